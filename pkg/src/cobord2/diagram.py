"""Sequences and stacked diagrams over a partially-composable 2-level
structure.

Compositions of simple morphisms are only partially defined, so general
1-morphisms are represented by sequences of simple ones and general
2-morphisms by planar diagrams.  Diagrams here are restricted to stack
form: an ordered list of rows, each row a horizontal line of cells, a
cell being either a Wire (a simple 1-morphism passing through) or a
Face (a simple 2-morphism with declared source/target subsequences).
Every diagram produced by the cobordism evaluation and by the
identification patches is a stack, and stack form keeps normalization
and equality decidable by deterministic scans.

The concrete content (what the simple morphisms are, when they compose,
what the identification 2-morphisms are) is supplied by an Instance.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any, Iterable, Optional


class BoundaryMismatch(ValueError):
    pass


class NotALoop(ValueError):
    pass


class NotAdjacentStep(ValueError):
    pass


class EquivResult(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


# --- instance interface -----------------------------------------------------


class Instance:
    """Callback bundle describing one partially-composable structure.

    Subclasses must provide the composition callbacks they intend to
    use; the optional hooks default to "no extra structure".
    """

    def ends1(self, item) -> tuple:
        """(source object, target object) of a simple 1-morphism."""
        raise NotImplementedError

    def objects_equal(self, x, y) -> bool:
        return x == y

    def opposite_object(self, obj):
        raise NotImplementedError

    def adjoint1(self, item):
        raise NotImplementedError

    def opposite1(self, item):
        raise NotImplementedError

    def try_compose1(self, a, b) -> Optional[Any]:
        raise NotImplementedError

    def identification2(self, a, b):
        """Simple 2-morphism (a, b) => a o b for a composable pair."""
        raise NotImplementedError

    def adjoint2(self, morph):
        raise NotImplementedError

    def boundary_of_simple2(self, morph) -> tuple:
        """(source items, target items) of a simple 2-morphism."""
        raise NotImplementedError

    def try_compose2_vertical(self, a, b) -> Optional[Any]:
        return None

    def simple2_equal(self, a, b) -> bool:
        return a == b

    def is_identity1(self, item) -> bool:
        return False

    def is_identity2(self, morph) -> bool:
        return False

    def enumerate_decompositions(self, item) -> Iterable[tuple]:
        return ()

    def probes(self, seq) -> list:
        """(name, probe) pairs: probe 2-morphisms from seq to seq."""
        return []

    def transport_probe(self, probe, seq_from, seq_to, pos, compose, side):
        """Carry a probe across one composition/decomposition move."""
        raise NotImplementedError

    def diagram_rewrites(self, diagram: "StackDiagram") -> Optional["StackDiagram"]:
        """Instance-specific multi-row rewrite; None when nothing applies."""
        return None


# --- sequences ---------------------------------------------------------------


@dataclass(frozen=True)
class SeqMorphism:
    source: Any
    target: Any
    items: tuple

    def __post_init__(self):
        if not self.items and self.source != self.target:
            raise BoundaryMismatch("empty sequence needs source == target")

    def __len__(self):
        return len(self.items)

    def adjoint(self, inst: Instance) -> "SeqMorphism":
        return SeqMorphism(
            self.target, self.source, tuple(inst.adjoint1(i) for i in reversed(self.items))
        )


def seq_from_items(inst: Instance, items, source=None) -> SeqMorphism:
    items = tuple(items)
    if not items:
        if source is None:
            raise BoundaryMismatch("empty sequence needs an explicit object")
        return SeqMorphism(source, source, ())
    ends = [inst.ends1(i) for i in items]
    for (_, t), (s, _) in zip(ends, ends[1:]):
        if not inst.objects_equal(t, s):
            raise BoundaryMismatch("consecutive items do not chain: %r vs %r" % (t, s))
    return SeqMorphism(ends[0][0], ends[-1][1], items)


def concat_h1(a: SeqMorphism, b: SeqMorphism) -> SeqMorphism:
    if a.target != b.source:
        raise BoundaryMismatch("cannot concatenate %r -> %r" % (a.target, b.source))
    return SeqMorphism(a.source, b.target, a.items + b.items)


# --- diagrams ----------------------------------------------------------------


@dataclass(frozen=True)
class Wire:
    item: Any

    @property
    def src_items(self):
        return (self.item,)

    @property
    def tgt_items(self):
        return (self.item,)


@dataclass(frozen=True)
class Face:
    morph: Any
    src_items: tuple
    tgt_items: tuple


Cell = Any  # Wire | Face


def _row_source(row) -> tuple:
    out = []
    for cell in row:
        out.extend(cell.src_items)
    return tuple(out)


def _row_target(row) -> tuple:
    out = []
    for cell in row:
        out.extend(cell.tgt_items)
    return tuple(out)


@dataclass(frozen=True)
class StackDiagram:
    source: SeqMorphism
    rows: tuple

    def __post_init__(self):
        cur = self.source.items
        for k, row in enumerate(self.rows):
            if _row_source(row) != cur:
                raise BoundaryMismatch("row %d source does not match" % k)
            cur = _row_target(row)

    @property
    def target(self) -> SeqMorphism:
        cur = self.source.items
        for row in self.rows:
            cur = _row_target(row)
        return SeqMorphism(self.source.source, self.source.target, cur)

    def face_count(self) -> int:
        return sum(1 for row in self.rows for c in row if isinstance(c, Face))


def identity_diagram(seq: SeqMorphism) -> StackDiagram:
    return StackDiagram(seq, ())


def wire_row(items) -> tuple:
    return tuple(Wire(i) for i in items)


def concat_v2(c: StackDiagram, d: StackDiagram) -> StackDiagram:
    if c.target.items != d.source.items:
        raise BoundaryMismatch("vertical gluing boundary mismatch")
    return StackDiagram(c.source, c.rows + d.rows)


def concat_h2(c: StackDiagram, d: StackDiagram) -> StackDiagram:
    if c.source.target != d.source.source:
        raise BoundaryMismatch("horizontal gluing needs matching endpoint objects")
    nc, nd = len(c.rows), len(d.rows)
    n = max(nc, nd)
    c_items = c.target.items
    d_items = d.source.items
    rows = []
    d_cur = d_items
    for k in range(n):
        left = c.rows[k] if k < nc else wire_row(c_items)
        if k < nd:
            right = d.rows[k]
            d_cur = _row_target(right)
        else:
            right = wire_row(d_cur)
        rows.append(left + right)
    source = concat_h1(c.source, d.source)
    return StackDiagram(source, tuple(rows))


# --- normalization -----------------------------------------------------------


def _face_positions(row):
    """(cell index, source offset, target offset) of each Face in a row."""
    out = []
    so = to = 0
    for k, cell in enumerate(row):
        if isinstance(cell, Face):
            out.append((k, so, to))
        so += len(cell.src_items)
        to += len(cell.tgt_items)
    return out

def _stagger(rows):
    """Split multi-face rows so every row holds at most one face,
    emitting the leftmost face first."""
    out = []
    for row in rows:
        faces = _face_positions(row)
        while len(faces) > 1:
            k = faces[0][0]
            top = []
            bottom = []
            for j, cell in enumerate(row):
                if j < k:
                    top.append(cell)
                    bottom.append(Wire(cell.tgt_items[0]) if isinstance(cell, Wire) else cell)
                elif j == k:
                    top.append(cell)
                    bottom.extend(Wire(i) for i in cell.tgt_items)
                else:
                    top.extend(Wire(i) for i in cell.src_items)
                    bottom.append(cell)
            out.append(tuple(top))
            row = tuple(bottom)
            faces = _face_positions(row)
        out.append(row)
    return out


def _clean(rows, inst):
    """Drop identity faces and all-wire rows."""
    out = []
    changed = False
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, Face) and inst.is_identity2(cell.morph):
                if cell.src_items != cell.tgt_items:
                    raise BoundaryMismatch("identity face with unequal boundaries")
                cells.extend(Wire(i) for i in cell.src_items)
                changed = True
            else:
                cells.append(cell)
        if all(isinstance(c, Wire) for c in cells):
            changed = True
            continue
        out.append(tuple(cells))
    return out, changed


def _try_merge(r1, r2, inst):
    """Merge two single-face rows when the upper face's full target is
    exactly the lower face's full source, at the same columns."""
    (k1, s1, t1), = _face_positions(r1)
    (k2, s2, _), = _face_positions(r2)
    a, b = r1[k1], r2[k2]
    if t1 != s2 or a.tgt_items != b.src_items:
        return None
    merged = inst.try_compose2_vertical(a.morph, b.morph)
    if merged is None:
        return None
    cells = list(r1[:k1])
    cells.append(Face(merged, a.src_items, b.tgt_items))
    cells.extend(r1[k1 + 1:])
    return tuple(cells)


def normalize_diagram(d: StackDiagram, inst: Instance) -> StackDiagram:
    """Deterministic normal form: stagger, drop identities and wire
    rows, merge vertically adjacent faces with matching full boundary,
    and reorder interchange-independent faces leftmost-first.  Each
    merge strictly reduces the face count, so the scan terminates."""
    rows = _stagger(list(d.rows))
    while True:
        rows, _ = _clean(rows, inst)
        hook = inst.diagram_rewrites(StackDiagram(d.source, tuple(rows)))
        if hook is not None:
            rows = _stagger(list(hook.rows))
            continue
        merged_any = False
        for k in range(len(rows) - 1):
            m = _try_merge(rows[k], rows[k + 1], inst)
            if m is not None:
                rows = rows[:k] + [m] + rows[k + 2:]
                merged_any = True
                break
        if merged_any:
            continue
        swapped = _interchange_pass(rows)
        if swapped is not None:
            rows = swapped
            continue
        break
    return StackDiagram(d.source, tuple(rows))


def _interchange_pass(rows):
    """One adjacent swap moving a strictly-left lower face above; the
    face-offset sequence decreases lexicographically, so repeated
    passes terminate."""
    for k in range(len(rows) - 1):
        r1, r2 = rows[k], rows[k + 1]
        (k1, s1, t1), = _face_positions(r1)
        (k2, s2, _), = _face_positions(r2)
        a, b = r1[k1], r2[k2]
        if s2 + len(b.src_items) <= s1:
            lead = list(r1[:k1])  # wires, one item each
            new_r1 = (
                tuple(lead[:s2])
                + (b,)
                + tuple(lead[s2 + len(b.src_items):])
                + tuple(Wire(i) for i in a.src_items)
                + tuple(r1[k1 + 1:])
            )
            offset = len(b.tgt_items) - len(b.src_items)
            mid = _row_target(new_r1)
            new_r2 = (
                tuple(Wire(i) for i in mid[: s1 + offset])
                + (a,)
                + tuple(Wire(i) for i in mid[s1 + offset + len(a.src_items):])
            )
            return rows[:k] + [new_r1, new_r2] + rows[k + 2:]
    return None


def diagrams_equal(d1: StackDiagram, d2: StackDiagram, inst: Instance) -> bool:
    """Structural equality of normal forms."""
    n1 = normalize_diagram(d1, inst)
    n2 = normalize_diagram(d2, inst)
    if n1.source.items != n2.source.items or len(n1.rows) != len(n2.rows):
        return False
    for r1, r2 in zip(n1.rows, n2.rows):
        if len(r1) != len(r2):
            return False
        for c1, c2 in zip(r1, r2):
            if isinstance(c1, Wire) != isinstance(c2, Wire):
                return False
            if isinstance(c1, Wire):
                if c1.item != c2.item:
                    return False
            else:
                if c1.src_items != c2.src_items or c1.tgt_items != c2.tgt_items:
                    return False
                if not inst.simple2_equal(c1.morph, c2.morph):
                    return False
    return True


# --- composition moves on sequences ------------------------------------------


def composition_step(inst, seq_a: SeqMorphism, seq_b: SeqMorphism):
    """Classify one move between sequences.

    Returns (pos, True) when seq_b is the composition of seq_a at pos,
    (pos, False) when seq_b is a decomposition of seq_a at pos; raises
    NotAdjacentStep otherwise."""
    na, nb = len(seq_a.items), len(seq_b.items)
    if nb == na - 1:
        big, small, compose = seq_a, seq_b, True
    elif nb == na + 1:
        big, small, compose = seq_b, seq_a, False
    else:
        raise NotAdjacentStep("lengths %d -> %d" % (na, nb))
    for p in range(len(big.items) - 1):
        if big.items[:p] != small.items[:p]:
            break
        if big.items[p + 2:] != small.items[p + 1:]:
            continue
        made = inst.try_compose1(big.items[p], big.items[p + 1])
        if made is not None and made == small.items[p]:
            return (p, compose)
    raise NotAdjacentStep("no composition position relates the sequences")


def patch_diagram(inst, loop) -> StackDiagram:
    """Stack of identification faces (or adjoints) realizing a chain of
    composition/decomposition moves."""
    rows = []
    for seq_a, seq_b in zip(loop, loop[1:]):
        pos, compose = composition_step(inst, seq_a, seq_b)
        if compose:
            a, b = seq_a.items[pos], seq_a.items[pos + 1]
            face = Face(inst.identification2(a, b), (a, b), (seq_b.items[pos],))
        else:
            a, b = seq_b.items[pos], seq_b.items[pos + 1]
            ident = inst.identification2(a, b)
            face = Face(inst.adjoint2(ident), (seq_a.items[pos],), (a, b))
        row = (
            wire_row(seq_a.items[:pos])
            + (face,)
            + wire_row(seq_a.items[pos + len(face.src_items):])
        )
        rows.append(row)
    return StackDiagram(loop[0], tuple(rows))


def check_diagram_axiom(loop, inst: Instance) -> list:
    """Transport every instance probe around a closed chain of
    composition/decomposition moves; each must return to itself.

    The loop must start and end at the same sequence.  Probes are
    carried across each move set-theoretically (the instance decides
    how), once with the probe attached below the chain and once above.
    Returns [(check name, passed, detail), ...]."""
    if len(loop) < 1:
        raise NotALoop("empty loop")
    if loop[0].items != loop[-1].items:
        raise NotALoop("loop does not close")
    steps = [composition_step(inst, a, b) for a, b in zip(loop, loop[1:])]
    results = []
    for side in ("target", "source"):
        for name, probe in inst.probes(loop[0]):
            carried = probe
            cur = loop[0]
            for (pos, compose), nxt in zip(steps, loop[1:]):
                carried = inst.transport_probe(carried, cur, nxt, pos, compose, side)
                cur = nxt
            ok = inst.simple2_equal(carried, probe)
            results.append(("%s/%s" % (name, side), ok, "" if ok else "probe changed"))
    return results


# --- bounded search for sequence equivalence ---------------------------------


def _neighbors(inst, seq: SeqMorphism):
    items = seq.items
    for p in range(len(items) - 1):
        made = inst.try_compose1(items[p], items[p + 1])
        if made is not None:
            yield SeqMorphism(seq.source, seq.target, items[:p] + (made,) + items[p + 2:])
    for p, item in enumerate(items):
        for a, b in inst.enumerate_decompositions(item):
            yield SeqMorphism(seq.source, seq.target, items[:p] + (a, b) + items[p + 1:])
        if inst.is_identity1(item):
            # an instance-declared identity is identified with the empty
            # sequence; insertion is left to the other search direction
            yield SeqMorphism(seq.source, seq.target, items[:p] + items[p + 1:])


def equiv_seq(a: SeqMorphism, b: SeqMorphism, inst: Instance, depth: int) -> EquivResult:
    """Bidirectional bounded search over composition moves.

    YES when connected within depth, NO when both reachable sets
    saturate without meeting, UNKNOWN when the depth budget runs out
    first."""
    if a.source != b.source or a.target != b.target:
        raise BoundaryMismatch("sequences do not share endpoints")
    if a.items == b.items:
        return EquivResult.YES
    seen_a = {a.items: a}
    seen_b = {b.items: b}
    frontier_a, frontier_b = [a], [b]
    for _ in range(depth):
        if not frontier_a and not frontier_b:
            return EquivResult.NO
        # expand the smaller frontier
        if frontier_a and (len(frontier_a) <= len(frontier_b) or not frontier_b):
            frontier, seen, other = frontier_a, seen_a, seen_b
            is_a = True
        else:
            frontier, seen, other = frontier_b, seen_b, seen_a
            is_a = False
        new = []
        for seq in frontier:
            for nxt in _neighbors(inst, seq):
                if nxt.items in other:
                    return EquivResult.YES
                if nxt.items not in seen:
                    seen[nxt.items] = nxt
                    new.append(nxt)
        if is_a:
            frontier_a = new
        else:
            frontier_b = new
    if not frontier_a and not frontier_b:
        return EquivResult.NO
    return EquivResult.UNKNOWN
