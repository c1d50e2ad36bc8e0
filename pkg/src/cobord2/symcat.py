"""Symbolic category of moduli correspondences.

Spaces are symbols, not manifolds: a Moduli symbol records, per
connected component, the genus and the labeled boundary circles on each
side; Cotangent symbols act as identities; the Point is the empty
surface.  Composition is the gluing arithmetic (genus from Euler
characteristic, boundary counts drop by two per glued circle), refusing
any composition that would close a component, and recording an excision
flag per glued circle for the holonomy -1 locus removed by gluing.

Correspondence symbols come in five kinds (diagonal, identification,
zero-section, trivial-holonomy locus, Weinstein graph).  The functor
out of decomposed cobordisms only ever produces these, so a closed
symbol algebra with a small vertical-composition rule table keeps
2-morphism equality decidable.  The codimension-3 equivalence is flag
erasure, guarded by a per-kind certificate that the erased locus meets
every adjacent correspondence weakly transversely."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from cobord2.diagram import (
    BoundaryMismatch,
    Face,
    Instance,
    SeqMorphism,
    StackDiagram,
    Wire,
    diagrams_equal,
    normalize_diagram,
)
from cobord2.words import Word


class NotComposableSym(ValueError):
    pass


class TransversalityUnknown(ValueError):
    """A correspondence kind without a weak-transversality certificate
    sits next to an excised space symbol."""


# circle entry: (label, orientation)
Circle = tuple


@dataclass(frozen=True)
class GroupSymbol:
    circles: tuple  # sorted (label, orient) pairs

    def __post_init__(self):
        object.__setattr__(self, "circles", tuple(sorted(self.circles)))
        labels = [c[0] for c in self.circles]
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate circle labels in group symbol")

    @property
    def labels(self):
        return tuple(c[0] for c in self.circles)

    def opposite(self) -> "GroupSymbol":
        return GroupSymbol(tuple((l, -o) for (l, o) in self.circles))


TRIVIAL_GROUP = GroupSymbol(())


@dataclass(frozen=True)
class ExcisionRecord:
    circle: str


@dataclass(frozen=True)
class Component:
    genus: int
    left: tuple  # sorted (label, orient)
    right: tuple

    def __post_init__(self):
        object.__setattr__(self, "left", tuple(sorted(self.left)))
        object.__setattr__(self, "right", tuple(sorted(self.right)))
        if self.genus < 0:
            raise ValueError("negative genus")
        if not self.left and not self.right:
            raise ValueError("closed component is not elementary")

    @property
    def k(self) -> int:
        return len(self.left) + len(self.right)

    @property
    def euler(self) -> int:
        return 2 - 2 * self.genus - self.k

    @property
    def dim(self) -> int:
        return 6 * self.genus + 6 * self.k - 6

    def transpose(self) -> "Component":
        return Component(self.genus, self.right, self.left)


@dataclass(frozen=True)
class SpaceSymbol:
    kind: str  # "moduli" | "cotangent" | "point"
    components: tuple = ()
    group: Optional[GroupSymbol] = None
    excised: frozenset = frozenset()

    def __post_init__(self):
        if self.kind not in ("moduli", "cotangent", "point"):
            raise ValueError("unknown space symbol kind %r" % self.kind)
        object.__setattr__(
            self, "components", tuple(sorted(self.components, key=_comp_key))
        )

    @property
    def source_group(self) -> GroupSymbol:
        if self.kind == "cotangent":
            return self.group
        return GroupSymbol(tuple(c for comp in self.components for c in comp.left))

    @property
    def target_group(self) -> GroupSymbol:
        if self.kind == "cotangent":
            return self.group
        return GroupSymbol(tuple(c for comp in self.components for c in comp.right))

    @property
    def dim(self) -> Optional[int]:
        if self.kind != "moduli":
            return None
        return sum(c.dim for c in self.components)

    @property
    def euler(self) -> int:
        return sum(c.euler for c in self.components)

    def without_excisions(self) -> "SpaceSymbol":
        if not self.excised:
            return self
        return SpaceSymbol(self.kind, self.components, self.group, frozenset())

    def with_excisions(self, records) -> "SpaceSymbol":
        return SpaceSymbol(
            self.kind, self.components, self.group, self.excised | frozenset(records)
        )

    def transpose(self) -> "SpaceSymbol":
        if self.kind == "cotangent":
            return self
        return SpaceSymbol(
            self.kind, tuple(c.transpose() for c in self.components), None, self.excised
        )


def _comp_key(c: Component):
    return (c.genus, c.left, c.right)


POINT = SpaceSymbol("point")


def moduli_symbol(*components) -> SpaceSymbol:
    if not components:
        return POINT
    return SpaceSymbol("moduli", tuple(components))


def cotangent_symbol(group: GroupSymbol) -> SpaceSymbol:
    return SpaceSymbol("cotangent", (), group)


def try_compose1_sym(a: SpaceSymbol, b: SpaceSymbol) -> Optional[SpaceSymbol]:
    """Glue along every middle circle; None when a component closes up."""
    if a.target_group != b.source_group:
        raise NotComposableSym(
            "middle group symbols differ: %r vs %r" % (a.target_group, b.source_group)
        )
    if a.kind == "cotangent":
        return b.with_excisions(a.excised)
    if b.kind == "cotangent":
        return a.with_excisions(b.excised)
    glued = a.target_group.circles
    # union-find over components of both symbols through the glued circles
    nodes = [("a", i) for i in range(len(a.components))] + [
        ("b", i) for i in range(len(b.components))
    ]
    parent = {n: n for n in nodes}

    def find(n):
        while parent[n] != n:
            parent[n] = parent[parent[n]]
            n = parent[n]
        return n

    def union(m, n):
        parent[find(m)] = find(n)

    owner_right = {
        c[0]: ("a", i) for i, comp in enumerate(a.components) for c in comp.right
    }
    owner_left = {
        c[0]: ("b", i) for i, comp in enumerate(b.components) for c in comp.left
    }
    for label, _ in glued:
        union(owner_right[label], owner_left[label])
    groups: dict = {}
    for n in nodes:
        groups.setdefault(find(n), []).append(n)
    glued_labels = {c[0] for c in glued}
    out = []
    for members in groups.values():
        comps = [
            a.components[i] if side == "a" else b.components[i] for side, i in members
        ]
        euler = sum(c.euler for c in comps)
        left = tuple(
            c
            for side, i in members
            if side == "a"
            for c in a.components[i].left
        ) + tuple(
            c
            for side, i in members
            if side == "b"
            for c in b.components[i].left
            if c[0] not in glued_labels
        )
        right = tuple(
            c
            for side, i in members
            if side == "b"
            for c in b.components[i].right
        ) + tuple(
            c
            for side, i in members
            if side == "a"
            for c in a.components[i].right
            if c[0] not in glued_labels
        )
        k = len(left) + len(right)
        if k == 0:
            return None
        genus2 = 2 - euler - k
        assert genus2 % 2 == 0 and genus2 >= 0
        out.append(Component(genus2 // 2, left, right))
    records = {ExcisionRecord(label) for label in glued_labels}
    return SpaceSymbol(
        "moduli" if out else "point",
        tuple(out),
        None,
        a.excised | b.excised | frozenset(records),
    )


# --- correspondence symbols ---------------------------------------------------


CERTIFIED_KINDS = ("diagonal", "identification", "zero_section", "hol_trivial", "weinstein")


@dataclass(frozen=True)
class CorrSymbol:
    kind: str
    src: tuple  # SpaceSymbols
    tgt: tuple
    transposed: bool = False
    glued: tuple = ()        # identification: circle labels
    circles: tuple = ()      # zero_section: disc boundary labels
    words: tuple = ()        # hol_trivial: Words on the uncompressed side
    group: Optional[GroupSymbol] = None  # weinstein
    transfer: tuple = field(default=(), compare=False)
    # transfer: ((small (kind, ref), big (kind, ref)), ...) pairs carrying
    # compressed-chart generators back to the uncompressed chart

    def __post_init__(self):
        if self.kind not in CERTIFIED_KINDS:
            raise TransversalityUnknown(
                "no weak-transversality certificate for kind %r" % self.kind
            )
        object.__setattr__(self, "glued", tuple(sorted(self.glued)))
        object.__setattr__(self, "circles", tuple(sorted(self.circles)))
        object.__setattr__(self, "words", tuple(sorted(self.words, key=repr)))

    def transpose(self) -> "CorrSymbol":
        return CorrSymbol(
            self.kind,
            self.tgt,
            self.src,
            not self.transposed,
            self.glued,
            self.circles,
            self.words,
            self.group,
            self.transfer,
        )

    def strip_excisions(self) -> "CorrSymbol":
        return CorrSymbol(
            self.kind,
            tuple(s.without_excisions() for s in self.src),
            tuple(s.without_excisions() for s in self.tgt),
            self.transposed,
            self.glued,
            self.circles,
            self.words,
            self.group,
            self.transfer,
        )

    @property
    def big_side(self) -> tuple:
        """The uncompressed boundary a hol_trivial's words live on."""
        return self.tgt if self.transposed else self.src


def diagonal_sym(items) -> CorrSymbol:
    items = tuple(items)
    return CorrSymbol("diagonal", items, items)


def identification_sym(a: SpaceSymbol, b: SpaceSymbol) -> CorrSymbol:
    made = try_compose1_sym(a, b)
    if made is None:
        raise NotComposableSym("gluing closes a component")
    glued = tuple(c[0] for c in a.target_group.circles)
    return CorrSymbol("identification", (a, b), (made,), glued=glued)


def _cancelling_pair(wa, wb) -> bool:
    """Single standard generators dual to each other: (a_j, b_j) on the
    same component, in either order."""
    if len(wa) != 1 or len(wb) != 1:
        return False
    ga, gb = wa[0].single_generator(), wb[0].single_generator()
    if ga is None or gb is None or wa[0].comp != wb[0].comp:
        return False
    return {ga[0], gb[0]} == {"a", "b"} and ga[1] == gb[1]


class HamInstance(Instance):
    """Callback bundle for the symbolic moduli category."""

    def ends1(self, item: SpaceSymbol):
        return (item.source_group, item.target_group)

    def opposite_object(self, obj: GroupSymbol):
        return obj.opposite()

    def adjoint1(self, item):
        return item.transpose()

    def opposite1(self, item: SpaceSymbol):
        if item.kind == "cotangent":
            return cotangent_symbol(item.group.opposite())
        comps = tuple(
            Component(
                c.genus,
                tuple((l, -o) for l, o in c.left),
                tuple((l, -o) for l, o in c.right),
            )
            for c in item.components
        )
        return SpaceSymbol(item.kind, comps, None, item.excised)

    def try_compose1(self, a, b):
        return try_compose1_sym(a, b)

    def is_identity1(self, item):
        return item.kind == "cotangent"

    def identification2(self, a, b):
        return identification_sym(a, b)

    def adjoint2(self, morph):
        return morph.transpose()

    def boundary_of_simple2(self, morph):
        return (morph.src, morph.tgt)

    def is_identity2(self, morph):
        return morph.kind == "diagonal" and morph.src == morph.tgt

    def try_compose2_vertical(self, a: CorrSymbol, b: CorrSymbol):
        if a.tgt != b.src:
            return None
        if a.kind == "diagonal":
            return b
        if b.kind == "diagonal":
            return a
        if a.kind == "identification" and b.kind == "identification":
            if a.glued == b.glued and a.transposed != b.transposed and b.tgt == a.src:
                return diagonal_sym(a.src)
            return None
        if a.kind == "hol_trivial" and b.kind == "hol_trivial":
            if not a.transposed and not b.transposed:
                # imbrication: both compress downward; pull the second
                # step's words back to the first uncompressed chart
                mapping = {small: big for small, big in a.transfer}
                lifted = tuple(w.substitute(mapping) for w in b.words)
                composed = tuple((s, mapping.get(m, m)) for s, m in b.transfer)
                return CorrSymbol(
                    "hol_trivial",
                    a.src,
                    b.tgt,
                    False,
                    words=a.words + lifted,
                    transfer=composed,
                )
            if a.transposed and not b.transposed:
                # handle creation then cancelling compression
                if _cancelling_pair(a.words, b.words) and a.src == b.tgt:
                    return diagonal_sym(a.src)
            return None
        return None

    def diagram_rewrites(self, diagram: StackDiagram):
        rows = diagram.rows
        for i in range(len(rows) - 2):
            hit = _match_ball_pattern(rows[i], rows[i + 1], rows[i + 2])
            if hit is not None:
                new_rows = rows[:i] + rows[i + 3:]
                return StackDiagram(diagram.source, new_rows)
        return None


def _face_at(row):
    for k, cell in enumerate(row):
        if isinstance(cell, Face):
            return k, cell
    return None


def _is_disc(sym: SpaceSymbol) -> bool:
    return (
        sym.kind == "moduli"
        and len(sym.components) == 1
        and sym.components[0].genus == 0
        and sym.components[0].k == 1
    )


def _match_ball_pattern(r1, r2, r3):
    """The 3-ball cancellation: a zero-section creating two discs, a
    transposed compression joining the second disc onto a neighbor, and
    the identification gluing the first disc back in compose to an
    identity (and its mirror, matched by the transposed stack)."""
    hit = _match_ball_pattern_down(r1, r2, r3)
    if hit is not None:
        return hit
    return _match_ball_pattern_down(
        *[_transpose_row(r) for r in (r3, r2, r1)]
    )


def _transpose_row(row):
    return tuple(
        Wire(c.item) if isinstance(c, Wire) else Face(c.morph.transpose(), c.tgt_items, c.src_items)
        for c in row
    )


def _match_ball_pattern_down(r1, r2, r3):
    f1 = _face_at(r1)
    f2 = _face_at(r2)
    f3 = _face_at(r3)
    if f1 is None or f2 is None or f3 is None:
        return None
    k1, z = f1
    k2, h = f2
    k3, ident = f3
    if z.morph.kind != "zero_section" or z.morph.transposed or z.src_items:
        return None
    if len(z.tgt_items) != 2 or not all(_is_disc(s) for s in z.tgt_items):
        return None
    if h.morph.kind != "hol_trivial" or not h.morph.transposed:
        return None
    if ident.morph.kind != "identification" or ident.morph.transposed:
        return None
    d0, d1 = z.tgt_items
    # single-face rows: cell index equals source-column offset, so the
    # compression must sit one column right of the zero-section and the
    # identification directly under it, with d0 passing as a wire
    if k2 != k1 + 1 or k3 != k1:
        return None
    # the compression's uncompressed side must start with d1 and produce
    # the joined surface the identification then glues to d0
    if len(h.src_items) < 1 or h.src_items[0] != d1:
        return None
    if len(ident.src_items) < 2 or ident.src_items[0] != d0:
        return None
    if ident.src_items[1:] != h.tgt_items:
        return None
    circle = d0.components[0].left + d0.components[0].right
    if ident.morph.glued != tuple(c[0] for c in circle):
        return None
    # the three-step block must return to the surface it started from
    if ident.tgt_items != h.src_items[1:]:
        return None
    return True


# --- the codimension-3 equivalence --------------------------------------------


def strip_diagram_excisions(d: StackDiagram) -> StackDiagram:
    """Erase every excision flag in a diagram; constructing CorrSymbols
    already certified their kinds as weakly transverse, so the erasure
    is licensed everywhere."""

    def strip_cell(cell):
        if isinstance(cell, Wire):
            return Wire(cell.item.without_excisions())
        return Face(
            cell.morph.strip_excisions(),
            tuple(s.without_excisions() for s in cell.src_items),
            tuple(s.without_excisions() for s in cell.tgt_items),
        )

    src = SeqMorphism(
        d.source.source,
        d.source.target,
        tuple(i.without_excisions() for i in d.source.items),
    )
    return StackDiagram(src, tuple(tuple(strip_cell(c) for c in row) for row in d.rows))


def normalize_mod_equiv(d: StackDiagram, inst: Optional[HamInstance] = None) -> StackDiagram:
    """Flag erasure followed by the deterministic diagram normal form."""
    inst = inst or HamInstance()
    return normalize_diagram(strip_diagram_excisions(d), inst)


def equal_2morphisms(d1: StackDiagram, d2: StackDiagram, inst: Optional[HamInstance] = None) -> bool:
    inst = inst or HamInstance()
    s1, s2 = strip_diagram_excisions(d1), strip_diagram_excisions(d2)
    if s1.source.items != s2.source.items or s1.target.items != s2.target.items:
        raise BoundaryMismatch("2-morphisms have different boundary sequences")
    return diagrams_equal(s1, s2, inst)


def weinstein_identity(item: SpaceSymbol) -> tuple:
    """The length-two identity representative of a space symbol: the
    Weinstein graph correspondence to (cotangent, item) and back."""
    t_star = cotangent_symbol(item.source_group)
    lam = CorrSymbol("weinstein", (item,), (t_star, item), group=item.source_group)
    return lam, lam.transpose()


class StrippedHamInstance(HamInstance):
    """Symbol instance working modulo the excision flags: compositions
    are flag-erased, so sequence equivalence implements the quotient
    where a space and the space minus its excised loci are identified."""

    def try_compose1(self, a, b):
        made = try_compose1_sym(a.without_excisions(), b.without_excisions())
        return None if made is None else made.without_excisions()


def equiv_seq_mod_excision(a: SeqMorphism, b: SeqMorphism, depth: int):
    """Bounded equivalence of 1-morphism sequences modulo composition
    moves and flag erasure."""
    from cobord2.diagram import equiv_seq, seq_from_items

    inst = StrippedHamInstance()
    sa = seq_from_items(inst, tuple(i.without_excisions() for i in a.items), source=a.source)
    sb = seq_from_items(inst, tuple(i.without_excisions() for i in b.items), source=b.source)
    return equiv_seq(sa, sb, inst, depth)
