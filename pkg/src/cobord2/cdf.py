"""Line-oriented file formats.

CDF (cobordism description files) describe a decomposed cobordism and
optionally a move chain:

    @circles
    c0 +
    mid +
    @surfaces
    ann  comp g=1 in=c0 out=c1
    @chain ann
    @steps
    cylinder
    compression2 0 0  a1
    compression1 0.0 0.0
    @moves
    create12 0 0 0
    @manifold solid_torus

Words are whitespace-separated signed generators: ``a1 b2`` for handle
holonomies (trailing ``-`` inverts), ``d:c0`` / ``g:c0`` for boundary
loops and arcs.  Catalog files (.cat) declare finite groups and bisets:

    @groups
    z2 cyclic 2
    gt table 2  0 1 1 0
    @bisets
    idz2 identity z2
    @sequences
    idz2 idz2
    @depth 4

Both formats ignore blank lines and ``#`` comments.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from cobord2 import bisets as bs
from cobord2 import cobordism as cb
from cobord2.cobordism import Attachment, Circle, CobStep, Move, SurfComponent, Surface
from cobord2.words import Word


class ParseError(ValueError):
    pass


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def parse_word(tokens, comp: int = 0) -> Word:
    gens = []
    for tok in tokens:
        sign = 1
        if tok.endswith("-"):
            sign = -1
            tok = tok[:-1]
        if tok[0] in ("a", "b") and tok[1:].isdigit():
            gens.append((tok[0], int(tok[1:]), sign))
        elif tok[0] in ("d", "g") and tok[1:2] == ":":
            gens.append((tok[0], tok[2:], sign))
        else:
            raise ParseError("bad word token %r" % tok)
    return Word(comp, tuple(gens))


@dataclass
class CdfDocument:
    circles: dict = field(default_factory=dict)
    chain: tuple = ()
    steps: tuple = ()
    steps2: tuple = ()
    moves: tuple = ()
    manifold: Optional[tuple] = None

    def sequence(self):
        """The step sequence: explicit @steps, or the standard
        decomposition of the named manifold."""
        if self.steps:
            return self.steps
        if self.manifold is None:
            raise ParseError("document has neither steps nor a manifold")
        kind = self.manifold[0]
        if kind == "cylinder":
            if not self.chain:
                raise ParseError("cylinder needs a @chain")
            return cb.cylinder_seq(self.chain)
        if kind == "solid_torus":
            return cb.solid_torus_seq(*self.manifold[1:])
        if kind == "closed_surface":
            chain = cb.closed_surface_chain(int(self.manifold[1]))
            return cb.cylinder_seq(chain)
        raise ParseError("unknown manifold %r" % kind)


def parse_cdf(text: str) -> CdfDocument:
    doc = CdfDocument()
    surfaces: dict = {}
    section = None
    chain_names: list = []
    step_lines: list = []
    step2_lines: list = []
    move_lines: list = []
    for lineno, line in _lines(text):
        if line.startswith("@"):
            parts = line.split()
            section = parts[0][1:]
            if section == "chain":
                chain_names = parts[1:]
            elif section == "manifold":
                doc.manifold = tuple(parts[1:])
            elif section not in ("circles", "surfaces", "steps", "steps2", "moves"):
                raise ParseError("line %d: unknown section %r" % (lineno, section))
            continue
        if section == "circles":
            parts = line.split()
            label = parts[0]
            orient = -1 if len(parts) > 1 and parts[1] == "-" else 1
            doc.circles[label] = Circle(label, orient)
        elif section == "surfaces":
            name, rest = line.split(None, 1)
            surfaces[name] = _parse_surface(rest, doc.circles, lineno)
        elif section == "steps":
            step_lines.append((lineno, line))
        elif section == "steps2":
            step2_lines.append((lineno, line))
        elif section == "moves":
            move_lines.append((lineno, line))
        else:
            raise ParseError("line %d: content outside any section" % lineno)
    try:
        doc.chain = tuple(surfaces[n] for n in chain_names)
    except KeyError as err:
        raise ParseError("unknown surface name %s" % err)
    doc.steps = _build_steps(doc.chain, step_lines)
    doc.steps2 = _build_steps(doc.chain, step2_lines)
    doc.moves = tuple(_parse_move(lineno, line) for lineno, line in move_lines)
    return doc


def _parse_surface(text: str, circles: dict, lineno: int) -> Surface:
    comps = []
    for block in text.split(";"):
        parts = block.split()
        if not parts or parts[0] != "comp":
            raise ParseError("line %d: surface component must start with 'comp'" % lineno)
        genus = 0
        into: list = []
        out: list = []
        for p in parts[1:]:
            if p.startswith("g="):
                genus = int(p[2:])
            elif p.startswith("in="):
                into = [circles.get(l, Circle(l)) for l in p[3:].split(",") if l]
            elif p.startswith("out="):
                out = [circles.get(l, Circle(l)) for l in p[4:].split(",") if l]
            else:
                raise ParseError("line %d: bad component field %r" % (lineno, p))
        comps.append(SurfComponent(genus, tuple(into), tuple(out)))
    source = tuple(c for comp in comps for c in comp.into)
    target = tuple(c for comp in comps for c in comp.out)
    try:
        return Surface(tuple(comps), source, target)
    except (cb.ChainMismatch, ValueError) as err:
        raise ParseError("line %d: %s" % (lineno, err))


def _build_steps(chain, step_lines) -> tuple:
    steps = []
    cur = chain
    for lineno, line in step_lines:
        parts = line.split()
        kind = parts[0]
        try:
            step = _build_step(kind, parts[1:], cur)
        except (cb.PatternMismatch, cb.ChainMismatch, ValueError, IndexError) as err:
            raise ParseError("line %d: %s" % (lineno, err))
        steps.append(step)
        cur = step.target
    return tuple(steps)


def _build_step(kind, args, cur) -> CobStep:
    if kind == "cylinder":
        return CobStep(cb.CYLINDER, cur, cur)
    if kind == "zero_handle":
        pos, label = int(args[0]), args[1]
        c = Circle(label)
        d0 = Surface((SurfComponent(0, (), (c,)),), (), (c,))
        d1 = Surface((SurfComponent(0, (c,), ()),), (c,), ())
        target = cur[:pos] + (d0, d1) + cur[pos:]
        return CobStep(cb.ZERO_HANDLE, cur, target, position=pos, circle=label)
    if kind == "three_handle":
        pos, label = int(args[0]), args[1]
        target = cur[:pos] + cur[pos + 2:]
        return CobStep(cb.THREE_HANDLE, cur, target, position=pos, circle=label)
    if kind == "circle_remove":
        pos, label = int(args[0]), args[1]
        merged = cb.glue_surfaces(cur[pos], cur[pos + 1])
        if merged is None:
            raise cb.PatternMismatch("gluing closes a component")
        target = cur[:pos] + (merged,) + cur[pos + 2:]
        return CobStep(cb.CIRCLE_REMOVE, cur, target, position=pos, circle=label)
    if kind == "circle_insert":
        pos, label, item_idx, g1 = int(args[0]), args[1], int(args[2]), int(args[3])
        item = cur[item_idx]
        comp = item.components[0]
        c = Circle(label)
        p1 = Surface((SurfComponent(g1, comp.into, (c,)),), item.source, (c,))
        p2 = Surface((SurfComponent(comp.genus - g1, (c,), comp.out),), (c,), item.target)
        target = cur[:item_idx] + (p1, p2) + cur[item_idx + 1:]
        return CobStep(cb.CIRCLE_INSERT, cur, target, position=pos, circle=label)
    if kind == "compression2":
        item, comp = int(args[0]), int(args[1])
        word = parse_word(args[2:], comp)
        att = Attachment(item, comp, word=word)
        target = cb._compress_chain(cur, (att,))
        target = _maybe_split_items(target)
        return CobStep(cb.COMPRESSION, cur, target, index=2, attachments=(att,))
    if kind == "compression1":
        feet = []
        for tok in args:
            a, b = tok.split(".")
            feet.append((int(a), int(b)))
        if len(feet) != 2:
            raise cb.PatternMismatch("compression1 takes exactly two feet")
        return _build_idx1(cur, tuple(feet))
    raise cb.PatternMismatch("unknown step kind %r" % kind)


def _maybe_split_items(chain):
    """Let multi-component items whose components partition the chain
    interface fall apart into separate items; used after separating
    surgeries so the standard patterns stay in sequence form."""
    out = []
    for item in chain:
        if len(item.components) <= 1:
            out.append(item)
            continue
        pieces = []
        used_src = set()
        splittable = True
        for comp in item.components:
            src = tuple(c for c in item.source if c.label in {x.label for x in comp.into})
            tgt = tuple(c for c in item.target if c.label in {x.label for x in comp.out})
            if len(src) != len(comp.into) or len(tgt) != len(comp.out):
                splittable = False
                break
            pieces.append(Surface((comp,), src, tgt))
        if splittable and len(pieces) > 1 and all(
            not p.source for p in pieces[1:]
        ):
            out.extend(pieces)
        else:
            out.append(item)
    return tuple(out)


def _build_idx1(cur, feet) -> CobStep:
    (i1, c1), (i2, c2) = feet
    if i1 == i2 and c1 == c2:
        item = cur[i1]
        comp = item.components[c1]
        bumped = SurfComponent(comp.genus + 1, comp.into, comp.out)
        comps = item.components[:c1] + (bumped,) + item.components[c1 + 1:]
        new_item = Surface(comps, item.source, item.target)
        idx = new_item.components.index(bumped)
        belt = Word(idx, (("a", comp.genus + 1, 1),))
        target = cur[:i1] + (new_item,) + cur[i1 + 1:]
        att = Attachment(i1, idx, feet=feet, belt=belt)
        return CobStep(cb.COMPRESSION, cur, target, index=1, attachments=(att,))
    if i1 != i2:
        lo, hi = sorted((i1, i2))
        if hi != lo + 1 or cur[lo].target != ():
            raise cb.PatternMismatch("joined items must be adjacent over an empty interface")
        a_item, b_item = cur[lo], cur[hi]
        ca = a_item.components[c1 if lo == i1 else c2]
        zb = b_item.components[c2 if hi == i2 else c1]
        joined_comp = SurfComponent(ca.genus + zb.genus, ca.into + zb.into, ca.out + zb.out)
        rest = tuple(c for c in a_item.components if c != ca) + tuple(
            c for c in b_item.components if c != zb
        )
        new_item = Surface((joined_comp,) + rest, a_item.source + b_item.source,
                           a_item.target + b_item.target)
        idx = new_item.components.index(joined_comp)
        belt_gens = tuple(("d", x.label, 1) for x in ca.into + ca.out) + tuple(
            g for j in range(1, ca.genus + 1)
            for g in (("a", j, 1), ("b", j, 1), ("a", j, -1), ("b", j, -1))
        )
        belt = Word(idx, belt_gens)
        target = cur[:lo] + (new_item,) + cur[hi + 1:]
        att = Attachment(i1, idx, feet=feet, belt=belt)
        return CobStep(cb.COMPRESSION, cur, target, index=1, attachments=(att,))
    raise cb.PatternMismatch("1-handle feet on one item must name one component twice")


def _parse_move(lineno, line) -> Move:
    parts = line.split()
    kind = parts[0]
    args = parts[1:]
    try:
        if kind in ("cyl_create", "cyl_cancel", "circle_remove", "imbricate", "switch",
                    "cancel01", "cancel23", "cancel12"):
            return Move(kind, int(args[0]))
        if kind == "circle_insert":
            return Move(kind, int(args[0]), (int(args[1]), int(args[2]), args[3]))
        if kind == "split_compression":
            return Move(kind, int(args[0]), (int(args[1]),))
        if kind in ("create01", "create23"):
            return Move(kind, int(args[0]), (int(args[1]), args[2]))
        if kind == "create12":
            return Move(kind, int(args[0]), (int(args[1]), int(args[2])))
        if kind == "relabel":
            pairs = tuple(tuple(tok.split("=", 1)) for tok in args[1:])
            return Move(kind, int(args[0]), pairs)
    except (IndexError, ValueError) as err:
        raise ParseError("line %d: bad move arguments (%s)" % (lineno, err))
    raise ParseError("line %d: unknown move %r" % (lineno, kind))


# --- finite catalogs ------------------------------------------------------------


@dataclass
class CatalogDocument:
    groups: dict = field(default_factory=dict)
    bisets: dict = field(default_factory=dict)
    sequences: list = field(default_factory=list)
    depth: int = 4


def parse_catalog(text: str) -> CatalogDocument:
    doc = CatalogDocument()
    section = None
    for lineno, line in _lines(text):
        if line.startswith("@"):
            parts = line.split()
            section = parts[0][1:]
            if section == "depth":
                doc.depth = int(parts[1])
            elif section not in ("groups", "bisets", "sequences"):
                raise ParseError("line %d: unknown section %r" % (lineno, section))
            continue
        try:
            if section == "groups":
                _parse_group(doc, line)
            elif section == "bisets":
                _parse_biset(doc, line)
            elif section == "sequences":
                names = line.split()
                doc.sequences.append(tuple(doc.bisets[n] for n in names))
            else:
                raise ParseError("line %d: content outside any section" % lineno)
        except (bs.TableError, bs.NotComposable, KeyError, ValueError) as err:
            raise ParseError("line %d: %s" % (lineno, err))
    return doc


def _parse_group(doc, line):
    parts = line.split()
    name, kind = parts[0], parts[1]
    if kind == "cyclic":
        doc.groups[name] = bs.cyclic(int(parts[2]), name)
    elif kind == "symmetric":
        if int(parts[2]) != 3:
            raise ValueError("only the symmetric group on 3 letters ships")
        doc.groups[name] = bs.symmetric3(name)
    elif kind == "quaternion":
        doc.groups[name] = bs.quaternion8(name)
    elif kind == "product":
        doc.groups[name] = bs.product_group(doc.groups[parts[2]], doc.groups[parts[3]])
    elif kind == "table":
        n = int(parts[2])
        vals = [int(v) for v in parts[3:]]
        if len(vals) != n * n:
            raise ValueError("table needs %d entries" % (n * n))
        mult = tuple(tuple(vals[i * n:(i + 1) * n]) for i in range(n))
        doc.groups[name] = bs.FiniteGroup(name, mult)
    else:
        raise ValueError("unknown group kind %r" % kind)


def _parse_biset(doc, line):
    parts = line.split()
    name, kind = parts[0], parts[1]
    g = doc.groups[parts[2]]
    if kind == "identity":
        doc.bisets[name] = bs.identity_biset(g)
    elif kind == "biregular":
        doc.bisets[name] = bs.biregular_biset(g)
    elif kind == "pants":
        doc.bisets[name] = bs.pants_biset(g)
    elif kind == "copants":
        doc.bisets[name] = bs.copants_biset(g)
    elif kind == "unit":
        doc.bisets[name] = bs.unit_biset(g)
    elif kind == "counit":
        doc.bisets[name] = bs.unit_biset(g).adjoint()
    else:
        raise ValueError("unknown biset kind %r" % kind)
