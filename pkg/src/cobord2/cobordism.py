"""Decomposed 1+1+1 cobordisms: parametrized circles, elementary
surfaces, elementary 3-dimensional steps, and the move calculus
relating different decompositions of the same cobordism.

A decomposed 1-morphism is a chain of elementary surfaces (no closed
components); consecutive items share a complete 1-manifold interface,
possibly empty, in which case the total surface is a disjoint union.
Elementary steps are: cylinders; 0-/3-handles (a 3-ball entering or
leaving as a pair of discs at an empty chain point); single circle
insertion/removal at a one-circle interface; and compression bodies of
index 1 or 2 with their attaching data.  Attaching circles are stored
as words in the source chart's generators; index-1 steps also carry the
derived belt words on their target, since reversed they are index-2
attachments along those belts.

The move set relating any two decompositions of a diffeomorphic
cobordism is implemented as executable rewrites; the diffeomorphism
move itself is restricted to combinatorial relabelings and the
free/cyclic word normal moves, which is the decidable subset the
invariance checks need."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from cobord2.words import Word


class ChainMismatch(ValueError):
    pass


class PatternMismatch(ValueError):
    pass


class MoveChainInvalid(ValueError):
    pass


@dataclass(frozen=True)
class Circle:
    label: str
    orient: int = 1
    param: str = ""  # parametrization id; evaluation never keys on it

    def __post_init__(self):
        if self.orient not in (1, -1):
            raise ValueError("orientation must be +-1")

    def reversed(self) -> "Circle":
        return Circle(self.label, -self.orient, self.param)


def manifold(*labels) -> tuple:
    """A parametrized closed 1-manifold given by circle labels."""
    return tuple(Circle(l) if isinstance(l, str) else l for l in labels)


def _labels(circles) -> tuple:
    return tuple(sorted(c.label for c in circles))


@dataclass(frozen=True)
class SurfComponent:
    genus: int
    into: tuple   # Circles on the incoming side
    out: tuple

    def __post_init__(self):
        object.__setattr__(self, "into", tuple(sorted(self.into, key=lambda c: c.label)))
        object.__setattr__(self, "out", tuple(sorted(self.out, key=lambda c: c.label)))
        if self.genus < 0:
            raise ValueError("negative genus")
        if not self.into and not self.out:
            raise ValueError("closed component is not elementary")

    @property
    def k(self) -> int:
        return len(self.into) + len(self.out)

    @property
    def euler(self) -> int:
        return 2 - 2 * self.genus - self.k

    @property
    def boundary_labels(self) -> tuple:
        return tuple(c.label for c in self.into) + tuple(c.label for c in self.out)


@dataclass(frozen=True)
class Surface:
    """One elementary surface in a chain: components plus its declared
    source/target 1-manifolds."""
    components: tuple
    source: tuple  # Circles
    target: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "components", tuple(sorted(self.components, key=_comp_sort))
        )
        object.__setattr__(self, "source", tuple(sorted(self.source, key=lambda c: c.label)))
        object.__setattr__(self, "target", tuple(sorted(self.target, key=lambda c: c.label)))
        src = sorted(c.label for comp in self.components for c in comp.into)
        tgt = sorted(c.label for comp in self.components for c in comp.out)
        if src != sorted(c.label for c in self.source):
            raise ChainMismatch("component in-circles do not cover the source")
        if tgt != sorted(c.label for c in self.target):
            raise ChainMismatch("component out-circles do not cover the target")
        all_labels = [c.label for comp in self.components for c in comp.into + comp.out]
        if len(set(all_labels)) != len(all_labels):
            raise ChainMismatch("a circle label appears twice in one surface")

    @property
    def euler(self) -> int:
        return sum(c.euler for c in self.components)


def _comp_sort(c: SurfComponent):
    return (c.genus, tuple(x.label for x in c.into), tuple(x.label for x in c.out))


def surface(components, source, target) -> Surface:
    return Surface(tuple(components), manifold(*source), manifold(*target))


Chain = tuple  # of Surface


def validate_chain(chain) -> list:
    """Violations of the chain condition: consecutive interfaces must
    agree as labeled 1-manifolds."""
    out = []
    for i, (a, b) in enumerate(zip(chain, chain[1:])):
        if _labels(a.target) != _labels(b.source):
            out.append("interface %d: %r vs %r" % (i, _labels(a.target), _labels(b.source)))
    return out


def chain_source(chain) -> tuple:
    return chain[0].source if chain else ()


def chain_target(chain) -> tuple:
    return chain[-1].target if chain else ()


# --- steps ----------------------------------------------------------------------


CYLINDER = "cylinder"
ZERO_HANDLE = "zero_handle"
THREE_HANDLE = "three_handle"
CIRCLE_INSERT = "circle_insert"
CIRCLE_REMOVE = "circle_remove"
COMPRESSION = "compression"


@dataclass(frozen=True)
class Attachment:
    """One handle of a compression step.

    Index 2: word = the attaching circle on the source surface.  Index
    1: feet = the component pair receiving the handle (as (item, comp)
    pairs into the source chain) and belt = the derived attaching word
    on the target surface whose reversed 2-handle undoes this one."""
    item: int
    comp: int
    word: Optional[Word] = None
    feet: Optional[tuple] = None
    belt: Optional[Word] = None


@dataclass(frozen=True)
class CobStep:
    kind: str
    source: Chain
    target: Chain
    position: int = 0
    circle: Optional[str] = None
    index: int = 0
    attachments: tuple = ()

    def __post_init__(self):
        problems = validate_step(self)
        if problems:
            raise PatternMismatch("; ".join(problems))


CobSeq = tuple  # of CobStep


def validate_step(step: CobStep) -> list:
    out = []
    out.extend(validate_chain(step.source))
    out.extend(validate_chain(step.target))
    if step.kind == CYLINDER:
        if step.source != step.target:
            out.append("cylinder must repeat its decomposition")
    elif step.kind == ZERO_HANDLE:
        out.extend(_check_ball(step.source, step.target, step.position, step.circle))
    elif step.kind == THREE_HANDLE:
        out.extend(_check_ball(step.target, step.source, step.position, step.circle))
    elif step.kind == CIRCLE_REMOVE:
        out.extend(_check_circle_merge(step.source, step.target, step.position, step.circle))
    elif step.kind == CIRCLE_INSERT:
        out.extend(_check_circle_merge(step.target, step.source, step.position, step.circle))
    elif step.kind == COMPRESSION:
        if step.index not in (1, 2):
            out.append("compression index must be 1 or 2")
        elif step.index == 2:
            out.extend(_check_compression2(step.source, step.target, step.attachments))
        else:
            # an index-1 body reversed is an index-2 attachment along
            # the belts, which live on the target
            reversed_atts = tuple(
                Attachment(a.item, a.comp, word=a.belt) for a in step.attachments
            )
            out.extend(_check_compression2(step.target, step.source, reversed_atts))
    else:
        out.append("unknown step kind %r" % step.kind)
    return out


def _check_ball(before: Chain, after: Chain, pos: int, circle: Optional[str]) -> list:
    """after = before with a (disc, disc) pair inserted at an empty
    chain point; the two discs share the new circle and union to the
    boundary sphere of a 3-ball."""
    if circle is None:
        return ["ball step needs its circle label"]
    if len(after) != len(before) + 2:
        return ["ball step must insert exactly two disc items"]
    if pos < 0 or pos > len(before):
        return ["ball position out of range"]
    if before[:pos] != after[:pos] or before[pos:] != after[pos + 2:]:
        return ["ball step may not touch other items"]
    d0, d1 = after[pos], after[pos + 1]
    if before:
        here = before[pos - 1].target if pos >= 1 else before[0].source
        if _labels(here) != ():
            return ["ball insertion needs an empty chain point"]
    ok = (
        len(d0.components) == 1
        and d0.components[0].genus == 0
        and d0.components[0].k == 1
        and not d0.source
        and _labels(d0.target) == (circle,)
        and len(d1.components) == 1
        and d1.components[0].genus == 0
        and d1.components[0].k == 1
        and _labels(d1.source) == (circle,)
        and not d1.target
    )
    return [] if ok else ["ball step must insert the two discs bounding its sphere"]


def _check_circle_merge(before: Chain, after: Chain, pos: int, circle: Optional[str]) -> list:
    """after = before with items pos, pos+1 glued along their single
    shared circle."""
    if circle is None:
        return ["circle step needs its label"]
    if len(after) != len(before) - 1:
        return ["circle step must merge exactly two items"]
    if not 0 <= pos < len(before) - 1:
        return ["circle position out of range"]
    if before[:pos] != after[:pos] or before[pos + 2:] != after[pos + 1:]:
        return ["circle step may not touch other items"]
    a, b = before[pos], before[pos + 1]
    if _labels(a.target) != (circle,) or _labels(b.source) != (circle,):
        return ["removed circle must be the whole interface"]
    merged = glue_surfaces(a, b)
    if merged is None:
        return ["gluing would close a component"]
    if merged != after[pos]:
        return ["merged item does not match the gluing of its pieces"]
    return []


def glue_surfaces(a: Surface, b: Surface) -> Optional[Surface]:
    """Glue consecutive surfaces along their full interface; None when
    a closed component would appear."""
    mid = {c.label for c in a.target}
    nodes = [("a", i) for i in range(len(a.components))] + [
        ("b", i) for i in range(len(b.components))
    ]
    parent = {n: n for n in nodes}

    def find(n):
        while parent[n] != n:
            parent[n] = parent[parent[n]]
            n = parent[n]
        return n

    owner_out = {c.label: ("a", i) for i, comp in enumerate(a.components) for c in comp.out}
    owner_in = {c.label: ("b", i) for i, comp in enumerate(b.components) for c in comp.into}
    for label in mid:
        pa, pb = find(owner_out[label]), find(owner_in[label])
        parent[pa] = pb
    groups: dict = {}
    for n in nodes:
        groups.setdefault(find(n), []).append(n)
    comps = []
    for members in groups.values():
        parts = [a.components[i] if s == "a" else b.components[i] for s, i in members]
        euler = sum(c.euler for c in parts)
        into = [c for s, i in members if s == "a" for c in a.components[i].into]
        into += [
            c
            for s, i in members
            if s == "b"
            for c in b.components[i].into
            if c.label not in mid
        ]
        out = [c for s, i in members if s == "b" for c in b.components[i].out]
        out += [
            c
            for s, i in members
            if s == "a"
            for c in a.components[i].out
            if c.label not in mid
        ]
        k = len(into) + len(out)
        if k == 0:
            return None
        genus2 = 2 - euler - k
        if genus2 < 0 or genus2 % 2:
            return None
        comps.append(SurfComponent(genus2 // 2, tuple(into), tuple(out)))
    return Surface(tuple(comps), a.source, b.target)


def _check_compression2(src: Chain, tgt: Chain, attachments) -> list:
    """Index-2 surgery arithmetic: a separating word splits a component
    (genus and boundary sums preserved), a nonseparating one lowers the
    genus.  A surgered item may reappear in the target as a run of
    consecutive items chained over empty interfaces (pieces falling
    apart), so matching walks both chains in step."""
    by_item: dict = {}
    for att in attachments:
        if att.word is None:
            return ["index-2 attachment needs a word"]
        if not 0 <= att.item < len(src):
            return ["attachment references a missing item"]
        by_item.setdefault(att.item, []).append(att)
    j = 0
    for i, a in enumerate(src):
        atts = by_item.get(i, [])
        if not atts:
            if j >= len(tgt) or tgt[j] != a:
                return ["untouched item %d changed" % i]
            j += 1
            continue
        expected = _surger_components(a, atts)
        if expected is None:
            return ["surgery on item %d is inconsistent" % i]
        remaining = list(expected)
        first = True
        while remaining:
            if j >= len(tgt):
                return ["target is missing surgered pieces of item %d" % i]
            piece = tgt[j]
            if first:
                if _labels(piece.source) != _labels(a.source):
                    return ["surgered run of item %d starts on the wrong interface" % i]
            else:
                if piece.source != ():
                    return ["surgered pieces must fall apart over empty interfaces"]
            for c in piece.components:
                if c not in remaining:
                    return ["unexpected component after surgery on item %d" % i]
                remaining.remove(c)
            last_target = piece.target
            j += 1
            first = False
        if _labels(last_target) != _labels(a.target):
            return ["surgered run of item %d ends on the wrong interface" % i]
    if j != len(tgt):
        return ["target has extra items"]
    return []


def _surger_components(a: Surface, atts) -> Optional[list]:
    comps = list(a.components)
    for att in atts:
        if not 0 <= att.comp < len(comps):
            return None
        c = comps[att.comp]
        word = att.word
        if _is_nonseparating(word):
            if c.genus < 1:
                return None
            comps[att.comp] = SurfComponent(c.genus - 1, c.into, c.out)
        else:
            split = _separating_split(c, word)
            if split is None:
                return None
            comps[att.comp:att.comp + 1] = list(split)
    return comps


def _is_nonseparating(word: Word) -> bool:
    single = word.single_generator()
    return single is not None and single[0] in ("a", "b")


def _parse_separating(gens) -> Optional[tuple]:
    """One side of a separating word: d-loops and full commutators."""
    labels = set()
    handles = set()
    i = 0
    while i < len(gens):
        kind, ref, sign = gens[i]
        if kind == "d" and sign == 1:
            labels.add(ref)
            i += 1
        elif kind == "a" and sign == 1:
            if (
                i + 3 < len(gens)
                and gens[i + 1] == ("b", ref, 1)
                and gens[i + 2] == ("a", ref, -1)
                and gens[i + 3] == ("b", ref, -1)
            ):
                handles.add(ref)
                i += 4
            else:
                return None
        else:
            return None
    return labels, handles


def _separating_split(c: SurfComponent, word: Word) -> Optional[tuple]:
    """Split a component along a separating standard word: the word
    lists one side's boundary loops (d-generators) and handle
    commutators, which become the first piece.  Cutting and capping
    leaves two components whose genera and boundaries sum back."""
    parsed = None
    gens = list(word.gens)
    for r in range(max(1, len(gens))):
        parsed = _parse_separating(gens[r:] + gens[:r])
        if parsed is not None:
            break
    if parsed is None:
        return None
    labels, handles = parsed
    side_in = tuple(x for x in c.into if x.label in labels)
    side_out = tuple(x for x in c.out if x.label in labels)
    if len(side_in) + len(side_out) != len(labels):
        return None
    g1 = len(handles)
    if g1 > c.genus:
        return None
    rest_in = tuple(x for x in c.into if x.label not in labels)
    rest_out = tuple(x for x in c.out if x.label not in labels)
    if not side_in and not side_out:
        return None
    if not rest_in and not rest_out:
        return None
    return (
        SurfComponent(g1, side_in, side_out),
        SurfComponent(c.genus - g1, rest_in, rest_out),
    )


def word_id(word: Word) -> str:
    return "w" + "".join("%s%s%s" % (k, r, "p" if s > 0 else "n") for k, r, s in word.gens)


def validate(seq: CobSeq) -> list:
    """All violations in a step sequence: per-step arithmetic plus the
    chain condition between consecutive steps."""
    out = []
    for i, step in enumerate(seq):
        out.extend("step %d: %s" % (i, v) for v in validate_step(step))
    for i, (a, b) in enumerate(zip(seq, seq[1:])):
        if a.target != b.source:
            out.append("steps %d-%d: decompositions do not match" % (i, i + 1))
    return out


def seq_source(seq: CobSeq) -> Chain:
    return seq[0].source if seq else ()


def seq_target(seq: CobSeq) -> Chain:
    return seq[-1].target if seq else ()


def reverse_step(step: CobStep) -> CobStep:
    """The reversed cobordism of one step."""
    flip = {
        CYLINDER: CYLINDER,
        ZERO_HANDLE: THREE_HANDLE,
        THREE_HANDLE: ZERO_HANDLE,
        CIRCLE_INSERT: CIRCLE_REMOVE,
        CIRCLE_REMOVE: CIRCLE_INSERT,
        COMPRESSION: COMPRESSION,
    }
    index = 0
    atts = step.attachments
    if step.kind == COMPRESSION:
        index = 3 - step.index
        atts = tuple(
            Attachment(a.item, a.comp, word=a.belt, feet=a.feet, belt=a.word)
            for a in step.attachments
        )
    return CobStep(
        flip[step.kind], step.target, step.source, step.position, step.circle, index, atts
    )


# --- moves -------------------------------------------------------------------------


@dataclass(frozen=True)
class Move:
    kind: str
    pos: int = 0
    data: tuple = ()


def apply_move(seq: CobSeq, move: Move) -> CobSeq:
    handlers = {
        "relabel": _move_relabel,
        "cyl_create": _move_cyl_create,
        "cyl_cancel": _move_cyl_cancel,
        "circle_insert": _move_circle_insert,
        "circle_remove": _move_circle_remove,
        "imbricate": _move_imbricate,
        "split_compression": _move_split_compression,
        "switch": _move_switch,
        "cancel01": _move_cancel01,
        "create01": _move_create01,
        "cancel23": _move_cancel23,
        "create23": _move_create23,
        "cancel12": _move_cancel12,
        "create12": _move_create12,
    }
    if move.kind not in handlers:
        raise PatternMismatch("unknown move kind %r" % move.kind)
    return handlers[move.kind](seq, move)


def apply_moves(seq: CobSeq, moves) -> CobSeq:
    for m in moves:
        seq = apply_move(seq, m)
    return seq


def _relabel_circle(c: Circle, table: dict) -> Circle:
    return Circle(table.get(c.label, c.label), c.orient)


def _relabel_word(w: Word, table: dict) -> Word:
    return Word(
        w.comp,
        tuple((k, table.get(r, r) if k in ("g", "d") else r, s) for k, r, s in w.gens),
    )


def _relabel_surface(s: Surface, table: dict) -> Surface:
    comps = tuple(
        SurfComponent(
            c.genus,
            tuple(_relabel_circle(x, table) for x in c.into),
            tuple(_relabel_circle(x, table) for x in c.out),
        )
        for c in s.components
    )
    return Surface(
        comps,
        tuple(_relabel_circle(x, table) for x in s.source),
        tuple(_relabel_circle(x, table) for x in s.target),
    )


def _move_relabel(seq: CobSeq, move: Move) -> CobSeq:
    """Diffeomorphism equivalence, combinatorial subset: a bijective
    renaming of internal circle labels.  The outer boundary
    decompositions stay fixed."""
    table = dict(move.data)
    if len(set(table.values())) != len(table):
        raise PatternMismatch("relabeling is not injective")
    outer = set()
    for item in seq_source(seq) + seq_target(seq):
        for c in item.components:
            outer.update(x.label for x in c.into + c.out)
    if outer & set(table):
        raise PatternMismatch("relabeling may not touch the outer boundary")
    out = []
    for step in seq:
        out.append(
            CobStep(
                step.kind,
                tuple(_relabel_surface(s, table) for s in step.source),
                tuple(_relabel_surface(s, table) for s in step.target),
                step.position,
                table.get(step.circle, step.circle),
                step.index,
                tuple(
                    Attachment(
                        a.item,
                        a.comp,
                        word=_relabel_word(a.word, table) if a.word else None,
                        feet=a.feet,
                        belt=_relabel_word(a.belt, table) if a.belt else None,
                    )
                    for a in step.attachments
                ),
            )
        )
    return tuple(out)


def _move_cyl_create(seq: CobSeq, move: Move) -> CobSeq:
    pos = move.pos
    if not 0 <= pos <= len(seq):
        raise PatternMismatch("cylinder position out of range")
    if pos < len(seq):
        chain = seq[pos].source
    elif seq:
        chain = seq[-1].target
    else:
        raise PatternMismatch("empty sequence needs an explicit chain")
    cyl = CobStep(CYLINDER, chain, chain)
    return seq[:pos] + (cyl,) + seq[pos:]


def _move_cyl_cancel(seq: CobSeq, move: Move) -> CobSeq:
    pos = move.pos
    if not 0 <= pos < len(seq) or seq[pos].kind != CYLINDER:
        raise PatternMismatch("no cylinder at position %d" % pos)
    return seq[:pos] + seq[pos + 1:]


def _move_imbricate(seq: CobSeq, move: Move) -> CobSeq:
    """Merge adjacent same-index compression bodies, lifting the second
    step's attaching words to the first chart."""
    pos = move.pos
    if not 0 <= pos < len(seq) - 1:
        raise PatternMismatch("imbrication position out of range")
    s1, s2 = seq[pos], seq[pos + 1]
    if s1.kind != COMPRESSION or s2.kind != COMPRESSION or s1.index != s2.index:
        raise PatternMismatch("imbrication needs two compressions of one index")
    if s1.index == 2:
        merged = _imbricate2(s1, s2)
    else:
        merged = reverse_step(_imbricate2(reverse_step(s2), reverse_step(s1)))
    return seq[:pos] + (merged,) + seq[pos + 2:]


def _imbricate2(s1: CobStep, s2: CobStep) -> CobStep:
    lifted = []
    for att in s2.attachments:
        lift = _lift_attachment(att, s1)
        if lift is None:
            raise PatternMismatch("cannot lift an attaching word through the first step")
        lifted.append(lift)
    return CobStep(
        COMPRESSION, s1.source, s2.target, index=2,
        attachments=s1.attachments + tuple(lifted),
    )


def _lift_attachment(att: Attachment, s1: CobStep) -> Optional[Attachment]:
    """Re-express an attachment on s1.target in s1.source coordinates;
    supported for the label-stable compressions used here: the item/
    component tracking is by boundary labels, handle indices shift past
    the compressed handles."""
    tgt_item = s1.target[att.item]
    comp = tgt_item.components[att.comp]
    home = _find_component(s1.source, comp.boundary_labels)
    if home is None:
        return None
    item_idx, comp_idx, src_comp = home
    shifts = sorted(
        a.word.single_generator()[1]
        for a in s1.attachments
        if a.item == item_idx and a.comp == comp_idx and _is_nonseparating(a.word)
    )

    def lift_index(j):
        for cut in shifts:
            if j >= cut:
                j += 1
        return j

    word = Word(
        comp_idx,
        tuple(
            (k, lift_index(r) if k in ("a", "b") else r, s)
            for k, r, s in att.word.gens
        ),
    )
    return Attachment(item_idx, comp_idx, word=word)


def _find_component(chain: Chain, labels) -> Optional[tuple]:
    want = set(labels)
    for i, item in enumerate(chain):
        for j, comp in enumerate(item.components):
            if want <= set(comp.boundary_labels):
                return (i, j, comp)
    return None


def _move_split_compression(seq: CobSeq, move: Move) -> CobSeq:
    """Inverse imbrication: data = the number of attachments kept in
    the first of the two steps."""
    pos = move.pos
    (head_count,) = move.data
    if not 0 <= pos < len(seq) or seq[pos].kind != COMPRESSION:
        raise PatternMismatch("no compression at position %d" % pos)
    step = seq[pos]
    if not 0 < head_count < len(step.attachments):
        raise PatternMismatch("split must leave attachments on both sides")
    if step.index != 2:
        rev = _move_split_compression(
            (reverse_step(step),), Move("split_compression", 0, (len(step.attachments) - head_count,))
        )
        return seq[:pos] + tuple(reverse_step(s) for s in reversed(rev)) + seq[pos + 1:]
    head = step.attachments[:head_count]
    tail = step.attachments[head_count:]
    mid_chain = _compress_chain(step.source, head)
    first = CobStep(COMPRESSION, step.source, mid_chain, index=2, attachments=head)
    dropped = []
    for att in tail:
        low = _lower_attachment(att, first)
        if low is None:
            raise PatternMismatch("a tail word does not survive the first compression")
        dropped.append(low)
    second = CobStep(COMPRESSION, mid_chain, step.target, index=2, attachments=tuple(dropped))
    return seq[:pos] + (first, second) + seq[pos + 1:]


def _compress_chain(chain: Chain, attachments) -> Chain:
    by_item: dict = {}
    for a in attachments:
        by_item.setdefault(a.item, []).append(a)
    items = []
    for i, item in enumerate(chain):
        atts = by_item.get(i, [])
        if not atts:
            items.append(item)
            continue
        comps = _surger_components(item, atts)
        if comps is None:
            raise PatternMismatch("surgery arithmetic failed")
        items.append(Surface(tuple(comps), item.source, item.target))
    return tuple(items)


def _lower_attachment(att: Attachment, first: CobStep) -> Optional[Attachment]:
    """Push an attachment on first.source down to first.target: handle
    indices drop past the handles first compressed away."""
    src_item = first.source[att.item]
    comp = src_item.components[att.comp]
    home = _find_component(first.target, comp.boundary_labels)
    if home is None:
        return None
    item_idx, comp_idx, _ = home
    cuts = sorted(
        a.word.single_generator()[1]
        for a in first.attachments
        if a.item == att.item and a.comp == att.comp and _is_nonseparating(a.word)
    )

    def lower_index(j):
        out = j
        for cut in cuts:
            if j == cut:
                return None
            if j > cut:
                out -= 1
        return out

    gens = []
    for k, r, s in att.word.gens:
        if k in ("a", "b"):
            r2 = lower_index(r)
            if r2 is None:
                return None
            gens.append((k, r2, s))
        else:
            gens.append((k, r, s))
    return Attachment(item_idx, comp_idx, word=Word(comp_idx, tuple(gens)))


def _step_window(step: CobStep):
    """(lo, hi, delta): the item slice the step touches in its source
    and the item-count change."""
    src, tgt = step.source, step.target
    lo = 0
    while lo < len(src) and lo < len(tgt) and src[lo] == tgt[lo]:
        lo += 1
    hi_s, hi_t = len(src), len(tgt)
    while hi_s > lo and hi_t > lo and src[hi_s - 1] == tgt[hi_t - 1]:
        hi_s -= 1
        hi_t -= 1
    window = (lo, hi_s, len(tgt) - len(src))
    for att in step.attachments:
        ref = att.item if step.index == 2 else min(f[0] for f in att.feet or ((att.item, 0),))
        window = (min(window[0], ref), max(window[1], ref + 1), window[2])
    if step.kind in (ZERO_HANDLE, CIRCLE_INSERT):
        window = (min(window[0], step.position), window[1], window[2])
    return window


def _shift_step(step: CobStep, new_source: Chain, shift: int) -> CobStep:
    """Rebuild a step over a new ambient source with its local window
    moved by shift item positions."""
    lo, hi, delta = _step_window(step)
    replaced = step.target[lo: hi + delta]
    new_target = (
        new_source[: lo + shift] + replaced + new_source[hi + shift:]
    )
    atts = tuple(
        Attachment(
            a.item + shift,
            a.comp,
            word=a.word.with_component(a.word.comp) if a.word else None,
            feet=tuple((i + shift, c) for i, c in a.feet) if a.feet else None,
            belt=a.belt,
        )
        for a in step.attachments
    )
    return CobStep(
        step.kind,
        new_source,
        new_target,
        step.position + shift if step.kind in (ZERO_HANDLE, THREE_HANDLE, CIRCLE_INSERT, CIRCLE_REMOVE) else step.position,
        step.circle,
        step.index,
        atts,
    )


def _move_switch(seq: CobSeq, move: Move) -> CobSeq:
    """Exchange adjacent steps supported on disjoint item windows."""
    pos = move.pos
    if not 0 <= pos < len(seq) - 1:
        raise PatternMismatch("switch position out of range")
    s1, s2 = seq[pos], seq[pos + 1]
    lo1, hi1, d1 = _step_window(s1)
    lo2, hi2, d2 = _step_window(s2)
    if lo2 >= hi1 + d1:
        # s2 acts strictly right of s1's output window
        s2_first = _shift_step(s2, s1.source, -d1)
        s1_after = _shift_step(s1, s2_first.target, 0)
    elif hi2 + 0 <= lo1:
        s2_first = _shift_step(s2, s1.source, 0)
        s1_after = _shift_step(s1, s2_first.target, d2)
    else:
        raise PatternMismatch("steps overlap; cannot switch")
    if s1_after.target != s2.target:
        raise PatternMismatch("switched steps do not recompose")
    return seq[:pos] + (s2_first, s1_after) + seq[pos + 2:]


def _move_circle_insert(seq: CobSeq, move: Move) -> CobSeq:
    """Refine the decomposition at an internal level flanked by
    cylinders: the upstream cylinder becomes a circle insertion and the
    downstream one the matching removal.  Together with cylinder
    creation this realizes the level-refinement move wherever the
    neighbors are trivial."""
    level = move.pos
    item_idx, g1, label = move.data
    if not 1 <= level < len(seq):
        raise PatternMismatch("circle moves apply at internal levels")
    if seq[level - 1].kind != CYLINDER or seq[level].kind != CYLINDER:
        raise PatternMismatch("circle move needs cylinders on both sides")
    chain = seq[level].source
    if not 0 <= item_idx < len(chain):
        raise PatternMismatch("no item %d at this level" % item_idx)
    item = chain[item_idx]
    if len(item.components) != 1:
        raise PatternMismatch("refined item must be connected")
    comp = item.components[0]
    if not 0 <= g1 <= comp.genus:
        raise PatternMismatch("genus split out of range")
    c = Circle(label)
    p1 = Surface((SurfComponent(g1, comp.into, (c,)),), item.source, (c,))
    p2 = Surface((SurfComponent(comp.genus - g1, (c,), comp.out),), (c,), item.target)
    fine = chain[:item_idx] + (p1, p2) + chain[item_idx + 1:]
    ins = CobStep(CIRCLE_INSERT, chain, fine, position=item_idx, circle=label)
    rem = CobStep(CIRCLE_REMOVE, fine, chain, position=item_idx, circle=label)
    return seq[:level - 1] + (ins, rem) + seq[level + 1:]


def _move_circle_remove(seq: CobSeq, move: Move) -> CobSeq:
    """Coarsen the level created by the insertion move: an adjacent
    insert/remove pair of the same circle turns back into cylinders."""
    level = move.pos
    if not 1 <= level < len(seq):
        raise PatternMismatch("circle moves apply at internal levels")
    s1, s2 = seq[level - 1], seq[level]
    if s1.kind != CIRCLE_INSERT or s2.kind != CIRCLE_REMOVE:
        raise PatternMismatch("no insert/remove pair at this level")
    if s1.circle != s2.circle or s1.position != s2.position or s1.source != s2.target:
        raise PatternMismatch("insert/remove pair does not cancel")
    cyl = CobStep(CYLINDER, s1.source, s1.source)
    return seq[:level - 1] + (cyl, cyl) + seq[level + 1:]


def _move_cancel01(seq: CobSeq, move: Move) -> CobSeq:
    """(0-handle, joining 1-handle, circle removal) collapses to a
    cylinder."""
    pos = move.pos
    if pos + 3 > len(seq):
        raise PatternMismatch("cancellation needs three steps")
    s1, s2, s3 = seq[pos:pos + 3]
    if s1.kind != ZERO_HANDLE:
        raise PatternMismatch("first step must be a 0-handle")
    if s2.kind != COMPRESSION or s2.index != 1 or len(s2.attachments) != 1:
        raise PatternMismatch("second step must be a single 1-handle")
    if s3.kind != CIRCLE_REMOVE or s3.circle != s1.circle:
        raise PatternMismatch("third step must remove the 0-handle circle")
    att = s2.attachments[0]
    p = s1.position
    if att.feet is None or set(att.feet) != {(p + 1, 0), (p + 2, 0)}:
        raise PatternMismatch("1-handle must join the second disc to its neighbor")
    single = att.belt.single_generator() if att.belt else None
    if single != ("d", s1.circle):
        raise PatternMismatch("belt must be the 0-handle circle loop")
    if s3.position != p or s3.target != s1.source:
        raise PatternMismatch("pattern does not return to its source")
    return seq[:pos] + (CobStep(CYLINDER, s1.source, s1.source),) + seq[pos + 3:]


def _move_create01(seq: CobSeq, move: Move) -> CobSeq:
    """Inverse cancellation: expand a cylinder into the three-step
    pattern; data = (item index joined, circle label)."""
    pos = move.pos
    item_idx, label = move.data
    if not 0 <= pos < len(seq) or seq[pos].kind != CYLINDER:
        raise PatternMismatch("no cylinder at position %d" % pos)
    chain = seq[pos].source
    if not 0 <= item_idx < len(chain):
        raise PatternMismatch("no item %d in the chain" % item_idx)
    item = chain[item_idx]
    if item.source != ():
        raise PatternMismatch("0-handle insertion needs an empty chain point")
    c = Circle(label)
    d0 = Surface((SurfComponent(0, (), (c,)),), (), (c,))
    d1 = Surface((SurfComponent(0, (c,), ()),), (c,), ())
    fine = chain[:item_idx] + (d0, d1) + chain[item_idx:]
    s1 = CobStep(ZERO_HANDLE, chain, fine, position=item_idx, circle=label)
    target_comp = item.components[0]
    joined_comp = SurfComponent(
        target_comp.genus, target_comp.into + (c,), target_comp.out
    )
    rest = item.components[1:]
    joined = Surface((joined_comp,) + rest, (c,) + item.source, item.target)
    mid = chain[:item_idx] + (d0, joined) + chain[item_idx + 1:]
    comp_idx = joined.components.index(joined_comp)
    belt = Word(comp_idx, (("d", label, 1),))
    att = Attachment(
        item_idx + 1,
        comp_idx,
        feet=((item_idx + 1, 0), (item_idx + 2, 0)),
        belt=belt,
    )
    s2 = CobStep(COMPRESSION, fine, mid, index=1, attachments=(att,))
    s3 = CobStep(CIRCLE_REMOVE, mid, chain, position=item_idx, circle=label)
    return seq[:pos] + (s1, s2, s3) + seq[pos + 1:]


def _move_cancel23(seq: CobSeq, move: Move) -> CobSeq:
    pos = move.pos
    if pos + 3 > len(seq):
        raise PatternMismatch("cancellation needs three steps")
    rev = tuple(reverse_step(s) for s in reversed(seq[pos:pos + 3]))
    out = _move_cancel01(rev, Move("cancel01", 0))
    cyl = out[0]
    return seq[:pos] + (reverse_step(cyl),) + seq[pos + 3:]


def _move_create23(seq: CobSeq, move: Move) -> CobSeq:
    pos = move.pos
    if not 0 <= pos < len(seq) or seq[pos].kind != CYLINDER:
        raise PatternMismatch("no cylinder at position %d" % pos)
    expanded = _move_create01((seq[pos],), Move("create01", 0, move.data))
    flipped = tuple(reverse_step(s) for s in reversed(expanded))
    return seq[:pos] + flipped + seq[pos + 1:]


def _move_cancel12(seq: CobSeq, move: Move) -> CobSeq:
    """A 1-handle and a 2-handle along dual curves cancel to a
    cylinder."""
    pos = move.pos
    if pos + 2 > len(seq):
        raise PatternMismatch("cancellation needs two steps")
    s1, s2 = seq[pos], seq[pos + 1]
    if s1.kind != COMPRESSION or s1.index != 1 or len(s1.attachments) != 1:
        raise PatternMismatch("first step must be a single 1-handle")
    if s2.kind != COMPRESSION or s2.index != 2 or len(s2.attachments) != 1:
        raise PatternMismatch("second step must be a single 2-handle")
    a1, a2 = s1.attachments[0], s2.attachments[0]
    if (a1.item, a1.comp) != (a2.item, a2.comp):
        raise PatternMismatch("handles act on different components")
    b = a1.belt.single_generator() if a1.belt else None
    w = a2.word.single_generator()
    if b is None or w is None or b[1] != w[1] or {b[0], w[0]} != {"a", "b"}:
        raise PatternMismatch("attaching curves are not a cancelling dual pair")
    if s2.target != s1.source:
        raise PatternMismatch("pair does not return to its source")
    return seq[:pos] + (CobStep(CYLINDER, s1.source, s1.source),) + seq[pos + 2:]


def _move_create12(seq: CobSeq, move: Move) -> CobSeq:
    """Expand a cylinder into a cancelling 1-/2-handle pair on the
    component given in data = (item, comp)."""
    pos = move.pos
    item_idx, comp_idx = move.data
    if not 0 <= pos < len(seq) or seq[pos].kind != CYLINDER:
        raise PatternMismatch("no cylinder at position %d" % pos)
    chain = seq[pos].source
    if not 0 <= item_idx < len(chain):
        raise PatternMismatch("no item %d in the chain" % item_idx)
    item = chain[item_idx]
    if not 0 <= comp_idx < len(item.components):
        raise PatternMismatch("no component %d in item %d" % (comp_idx, item_idx))
    comp = item.components[comp_idx]
    bumped = SurfComponent(comp.genus + 1, comp.into, comp.out)
    mid_comps = item.components[:comp_idx] + (bumped,) + item.components[comp_idx + 1:]
    mid_item = Surface(mid_comps, item.source, item.target)
    mid_idx = mid_item.components.index(bumped)
    mid = chain[:item_idx] + (mid_item,) + chain[item_idx + 1:]
    j = comp.genus + 1
    belt = Word(mid_idx, (("a", j, 1),))
    s1 = CobStep(
        COMPRESSION, chain, mid, index=1,
        attachments=(Attachment(item_idx, mid_idx, feet=((item_idx, comp_idx), (item_idx, comp_idx)), belt=belt),),
    )
    s2 = CobStep(
        COMPRESSION, mid, chain, index=2,
        attachments=(Attachment(item_idx, mid_idx, word=Word(mid_idx, (("b", j, 1),))),),
    )
    return seq[:pos] + (s1, s2) + seq[pos + 1:]


# --- standard decompositions ----------------------------------------------------


def cylinder_seq(chain: Chain) -> CobSeq:
    return (CobStep(CYLINDER, chain, chain),)


def closed_surface_chain(genus: int, label: str = "eq") -> Chain:
    """A closed surface as two one-boundary pieces glued along one
    separating circle."""
    g1 = (genus + 1) // 2
    g2 = genus - g1
    c = Circle(label)
    return (
        Surface((SurfComponent(g1, (), (c,)),), (), (c,)),
        Surface((SurfComponent(g2, (c,), ()),), (c,), ()),
    )


def solid_torus_seq(label: str = "tc") -> CobSeq:
    """The solid torus from nothing to a decomposed torus: a 0-handle
    and a genus-raising 1-handle on the first disc."""
    c = Circle(label)
    d0 = Surface((SurfComponent(0, (), (c,)),), (), (c,))
    d1 = Surface((SurfComponent(0, (c,), ()),), (c,), ())
    s1 = CobStep(ZERO_HANDLE, (), (d0, d1), position=0, circle=label)
    handle = Surface((SurfComponent(1, (), (c,)),), (), (c,))
    belt = Word(0, (("a", 1, 1),))
    s2 = CobStep(
        COMPRESSION, (d0, d1), (handle, d1), index=1,
        attachments=(Attachment(0, 0, feet=((0, 0), (0, 0)), belt=belt),),
    )
    return (s1, s2)
