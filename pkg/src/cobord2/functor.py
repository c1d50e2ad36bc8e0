"""Evaluation of decomposed cobordisms into the symbolic category,
with numerical cross-checks in the holonomy charts.

Objects go to one SU(2) factor per circle, surfaces to moduli symbols
read off componentwise, and each elementary step to one diagram row:
cylinders to wires, balls to zero-sections (or their transposes),
circle moves to identification faces, index-2 compressions to
trivial-holonomy faces, and index-1 compressions to transposes of the
reversed index-2 evaluation along their belts.

The invariance checker evaluates two step sequences related by a move
chain, compares normal forms, and cross-checks sampled points of every
face against both diagrams."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import math

from cobord2 import charts as ch
from cobord2 import cobordism as cb
from cobord2 import su2
from cobord2.charts import ChartPoint, ModuliChart
from cobord2.cobordism import CobSeq, CobStep, MoveChainInvalid
from cobord2.diagram import Face, SeqMorphism, StackDiagram, Wire, seq_from_items
from cobord2.symcat import (
    Component,
    CorrSymbol,
    GroupSymbol,
    HamInstance,
    SpaceSymbol,
    equal_2morphisms,
    moduli_symbol,
    normalize_mod_equiv,
)
from cobord2.words import Word


def eval0(circles) -> GroupSymbol:
    """One SU(2) factor per circle, orientation recorded."""
    return GroupSymbol(tuple((c.label, c.orient) for c in circles))


def eval_component(comp: cb.SurfComponent) -> Component:
    return Component(
        comp.genus,
        tuple((c.label, c.orient) for c in comp.into),
        tuple((c.label, c.orient) for c in comp.out),
    )


def eval_surface(item: cb.Surface) -> SpaceSymbol:
    return moduli_symbol(*[eval_component(c) for c in item.components])


def eval1(chain, inst: Optional[HamInstance] = None) -> SeqMorphism:
    """Componentwise moduli symbols; keyed on circle labels, never on
    parametrizations, so reparametrized middles evaluate equal."""
    inst = inst or HamInstance()
    items = tuple(eval_surface(item) for item in chain)
    return seq_from_items(inst, items, source=eval0(cb.chain_source(chain)))


def chart_for(comp: Component) -> ModuliChart:
    """The chart of one component: boundary order is incoming labels
    then outgoing, each alphabetical."""
    boundaries = tuple(l for l, _ in comp.left) + tuple(l for l, _ in comp.right)
    return ModuliChart(comp.genus, boundaries, frozenset(l for l, _ in comp.left))


# --- step evaluation -------------------------------------------------------------


def _surgery_runs(step: CobStep):
    """[(source item index, attachments, target slice)] for a validated
    index-2 compression."""
    by_item: dict = {}
    for att in step.attachments:
        by_item.setdefault(att.item, []).append(att)
    runs = []
    j = 0
    for i, a in enumerate(step.source):
        atts = by_item.get(i, [])
        if not atts:
            j += 1
            continue
        expected = cb._surger_components(a, atts)
        remaining = list(expected)
        start = j
        while remaining:
            for c in step.target[j].components:
                remaining.remove(c)
            j += 1
        runs.append((i, atts, (start, j)))
    return runs


def _handle_transfer(src_comp: Component, atts, tgt_comps) -> tuple:
    """(small gen -> big gen) pairs per surgered piece: labels are
    stable, handle indices shift past compressed handles, and a
    separating split distributes the survivors in sorted order."""
    killed = set()
    sep_handles = None
    for att in atts:
        single = att.word.single_generator()
        if single and single[0] in ("a", "b"):
            killed.add(single[1])
        else:
            parsed = None
            gens = list(att.word.gens)
            for r in range(max(1, len(gens))):
                parsed = cb._parse_separating(gens[r:] + gens[:r])
                if parsed is not None:
                    break
            labels, handles = parsed
            sep_handles = (labels, handles)
    survivors = [j for j in range(1, src_comp.genus + 1) if j not in killed]
    out = []
    if sep_handles is None:
        # single piece: survivors relabel downward in order
        for small, big in enumerate(survivors, start=1):
            out.append((("a", small), ("a", big)))
            out.append((("b", small), ("b", big)))
        return tuple(out)
    labels, first_handles = sep_handles
    first = sorted(j for j in survivors if j in first_handles)
    second = sorted(j for j in survivors if j not in first_handles)
    for piece in (first, second):
        for small, big in enumerate(piece, start=1):
            out.append((("a", small), ("a", big)))
            out.append((("b", small), ("b", big)))
    return tuple(out)


@dataclass
class EvalContext:
    """Chart bindings and sampling configuration for numeric checks."""
    inst: HamInstance = field(default_factory=HamInstance)
    samples: int = 100
    tol: float = 1e-9


def eval2(seq: CobSeq, inst: Optional[HamInstance] = None) -> StackDiagram:
    """One diagram row per step, threading excision flags created by
    circle removals through later levels."""
    inst = inst or HamInstance()
    problems = cb.validate(seq)
    if problems:
        raise cb.PatternMismatch("; ".join(problems))
    if not seq:
        raise cb.PatternMismatch("empty step sequence has no boundary data")
    symbols = [eval_surface(item) for item in cb.seq_source(seq)]
    source = seq_from_items(inst, tuple(symbols), source=eval0(cb.chain_source(cb.seq_source(seq))))
    rows = []
    for step in seq:
        row, symbols = _eval_step(step, symbols, inst)
        rows.append(row)
    return StackDiagram(source, tuple(rows))


def _flags(syms) -> frozenset:
    out = frozenset()
    for s in syms:
        out |= s.excised
    return out


def _eval_step(step: CobStep, symbols, inst):
    kind = step.kind
    if kind == cb.CYLINDER:
        return tuple(Wire(s) for s in symbols), symbols
    if kind in (cb.ZERO_HANDLE, cb.THREE_HANDLE):
        p = step.position
        if kind == cb.ZERO_HANDLE:
            d0 = eval_surface(step.target[p])
            d1 = eval_surface(step.target[p + 1])
            face = CorrSymbol("zero_section", (), (d0, d1), circles=(step.circle,))
            new = symbols[:p] + [d0, d1] + symbols[p:]
            row = (
                tuple(Wire(s) for s in symbols[:p])
                + (Face(face, (), (d0, d1)),)
                + tuple(Wire(s) for s in symbols[p:])
            )
            return row, new
        d0, d1 = symbols[p], symbols[p + 1]
        face = CorrSymbol("zero_section", (d0, d1), (), circles=(step.circle,), transposed=True)
        new = symbols[:p] + symbols[p + 2:]
        row = (
            tuple(Wire(s) for s in symbols[:p])
            + (Face(face, (d0, d1), ()),)
            + tuple(Wire(s) for s in symbols[p + 2:])
        )
        return row, new
    if kind in (cb.CIRCLE_REMOVE, cb.CIRCLE_INSERT):
        p = step.position
        if kind == cb.CIRCLE_REMOVE:
            a, b = symbols[p], symbols[p + 1]
            ident = inst.identification2(a, b)
            glued = ident.tgt[0]
            new = symbols[:p] + [glued] + symbols[p + 2:]
            row = (
                tuple(Wire(s) for s in symbols[:p])
                + (Face(ident, (a, b), (glued,)),)
                + tuple(Wire(s) for s in symbols[p + 2:])
            )
            return row, new
        glued = symbols[p]
        a = eval_surface(step.target[p]).with_excisions(glued.excised)
        b = eval_surface(step.target[p + 1]).with_excisions(glued.excised)
        face = CorrSymbol(
            "identification", (glued,), (a, b), transposed=True, glued=(step.circle,)
        )
        new = symbols[:p] + [a, b] + symbols[p + 1:]
        row = (
            tuple(Wire(s) for s in symbols[:p])
            + (Face(face, (glued,), (a, b)),)
            + tuple(Wire(s) for s in symbols[p + 1:])
        )
        return row, new
    if kind == cb.COMPRESSION and step.index == 2:
        return _eval_compression2(step, symbols, inst, transposed=False)
    if kind == cb.COMPRESSION and step.index == 1:
        rev = cb.reverse_step(step)
        rev_symbols = [eval_surface(item).with_excisions(_flags(symbols)) for item in rev.source]
        row, out_symbols = _eval_compression2(rev, rev_symbols, inst, transposed=False)
        flipped = []
        consumed_src = 0
        consumed_tgt = 0
        new_row = []
        for cell in row:
            if isinstance(cell, Wire):
                new_row.append(Wire(symbols[consumed_src]))
                consumed_src += 1
                consumed_tgt += 1
            else:
                n_src = len(cell.tgt_items)
                src_items = tuple(symbols[consumed_src:consumed_src + n_src])
                face = cell.morph.transpose()
                face = CorrSymbol(
                    face.kind, src_items, face.tgt, True, face.glued,
                    face.circles, face.words, face.group, face.transfer,
                )
                new_row.append(Face(face, src_items, face.tgt))
                consumed_src += n_src
                consumed_tgt += len(cell.src_items)
        new_symbols = []
        for cell in new_row:
            new_symbols.extend(cell.tgt_items)
        return tuple(new_row), new_symbols
    raise cb.PatternMismatch("cannot evaluate step kind %r" % kind)


def _eval_compression2(step: CobStep, symbols, inst, transposed: bool):
    runs = {i: (atts, sl) for i, atts, sl in _surgery_runs(step)}
    row = []
    new_symbols = []
    for i, sym in enumerate(symbols):
        if i not in runs:
            row.append(Wire(sym))
            new_symbols.append(sym)
            continue
        atts, (lo, hi) = runs[i]
        targets = tuple(
            eval_surface(step.target[j]).with_excisions(sym.excised)
            for j in range(lo, hi)
        )
        words = tuple(att.word for att in atts)
        touched = {att.comp for att in atts}
        if len(touched) == 1:
            comp = sym.components[atts[0].comp]
            transfer = _handle_transfer(comp, atts, None)
        else:
            # generator bases do not carry their component, so lifting
            # through a multi-component face is not representable
            transfer = ()
        face = CorrSymbol(
            "hol_trivial", (sym,), targets, words=words, transfer=tuple(transfer)
        )
        row.append(Face(face, (sym,), targets))
        new_symbols.extend(targets)
    return tuple(row), new_symbols


# --- numeric membership -------------------------------------------------------------


def component_points(sym: SpaceSymbol, seed: int, zero_thetas=False) -> dict:
    """Random admissible chart point per component of a symbol."""
    return {
        i: ch.random_point(chart_for(c), su2.mix_seed(seed, i), zero_thetas=zero_thetas)
        for i, c in enumerate(sym.components)
    }


def membership(face: CorrSymbol, src_pts, tgt_pts, tol: float = 1e-9):
    """(member, residual) of a point pair in a correspondence symbol.

    src_pts / tgt_pts: per symbol in the face boundary, a dict
    component index -> ChartPoint."""
    kind = face.kind
    if kind == "diagonal":
        return _diag_membership(src_pts, tgt_pts, tol)
    if kind == "zero_section":
        pts = src_pts if face.transposed else tgt_pts
        worst = 0.0
        for comp_pts in pts:
            for p in comp_pts.values():
                for t in p.thetas:
                    worst = max(worst, t.norm())
                worst = max(worst, ch.theta1_of(p).norm())
        return worst <= tol, worst
    if kind == "identification":
        if face.transposed:
            return _ident_membership(tgt_pts, src_pts, face, tol)
        return _ident_membership(src_pts, tgt_pts, face, tol)
    if kind == "hol_trivial":
        if face.transposed:
            return _holtriv_membership(tgt_pts, src_pts, face, tol)
        return _holtriv_membership(src_pts, tgt_pts, face, tol)
    raise NotImplementedError("no numeric model for kind %r" % kind)


def _diag_membership(src_pts, tgt_pts, tol):
    worst = 0.0
    for a_pts, b_pts in zip(src_pts, tgt_pts):
        for i in a_pts:
            _, r, _ = ch.gauge_equivalent(a_pts[i], b_pts[i], tol)
            worst = max(worst, r)
    return worst <= tol, worst


def _relabel_point(p: ChartPoint, table: dict) -> ChartPoint:
    chart = ModuliChart(
        p.chart.genus,
        tuple(table.get(l, l) for l in p.chart.boundaries),
        frozenset(table.get(l, l) for l in p.chart.incoming),
    )
    return ChartPoint(chart, p.thetas, p.gammas, p.handles)


def _glue_symbol_points(pts_a: dict, pts_b: dict, glued):
    """Glue all matched circles between two symbols' points.  The
    second side's glued labels are primed first, so a pair that ends up
    on one connected piece self-glues without a label collision."""
    table = {l: l + "'" for l in glued}
    pieces = list(pts_a.values()) + [_relabel_point(p, table) for p in pts_b.values()]
    for label in glued:
        primed = table[label]
        owners = [
            p
            for p in pieces
            if label in p.chart.boundaries or primed in p.chart.boundaries
        ]
        if len(owners) == 2:
            p1 = next(p for p in owners if label in p.chart.boundaries)
            p2 = next(p for p in owners if primed in p.chart.boundaries)
            if p1.chart.sign(label) < 0:
                glued_pt, _ = ch.glue(p1, label, p2, primed)
            else:
                glued_pt, _ = ch.glue(p2, primed, p1, label)
            pieces.remove(p1)
            pieces.remove(p2)
            pieces.append(glued_pt)
        elif len(owners) == 1:
            glued_pt, _ = ch.glue_self(owners[0], label, primed)
            pieces.remove(owners[0])
            pieces.append(glued_pt)
        else:
            raise ValueError("glued circle %r not found" % label)
    return pieces


def _ident_membership(src_pts, tgt_pts, face, tol):
    try:
        pieces = _glue_symbol_points(src_pts[0], src_pts[1], face.glued)
    except (ch.MomentMismatch, su2.BranchError):
        return False, math.inf
    tgt_sym = (face.tgt if not face.transposed else face.src)[0]
    worst = 0.0
    tgt_map = tgt_pts[0]
    for i, comp in enumerate(tgt_sym.components):
        want = set(chart_for(comp).boundaries)
        cand = [p for p in pieces if set(p.chart.boundaries) == want]
        if not cand:
            return False, math.inf
        q = tgt_map[i]
        best = math.inf
        for p in cand:
            aligned = _permute_to_chart(p, q.chart)
            if aligned is None:
                continue
            _, r, _ = ch.gauge_equivalent(aligned, q, tol)
            best = min(best, r)
        worst = max(worst, best)
    return worst <= tol, worst


def _permute_to_chart(p: ChartPoint, chart: ModuliChart) -> Optional[ChartPoint]:
    """Move boundaries until the labels match the target chart order."""
    if set(p.chart.boundaries) != set(chart.boundaries):
        return None
    q = p
    if q.chart.boundaries[0] != chart.boundaries[0]:
        q = ch.move_boundary_first(q, chart.boundaries[0])
    for want_pos in range(1, chart.k):
        label = chart.boundaries[want_pos]
        pos = q.chart.index_of(label)
        while pos > want_pos:
            q = ch.swap_adjacent(q, pos - 1)
            pos -= 1
        while pos < want_pos:
            q = ch.swap_adjacent(q, pos)
            pos += 1
    if q.chart.boundaries != chart.boundaries:
        return None
    return ChartPoint(chart, q.thetas, q.gammas, q.handles)


def _holtriv_membership(big_pts, small_pts, face, tol):
    big_sym = face.big_side[0]
    small_syms = face.tgt if not face.transposed else face.src
    worst = 0.0
    pts = big_pts[0]
    for w in face.words:
        p = pts[w.comp]
        worst = max(worst, ch.word_residual(p, w))
    mapping = {small: big for small, big in face.transfer}
    flat_small = []
    offset = 0
    for sym, spts in zip(small_syms, small_pts):
        for i, comp in enumerate(sym.components):
            flat_small.append((comp, spts[i]))
    for comp, q in flat_small:
        src_idx, src_comp = _find_comp_with_labels(big_sym, chart_for(comp).boundaries)
        p = pts[src_idx]
        proj = _project_through_compression(p, q.chart, mapping)
        if proj is None:
            return False, math.inf
        _, r, _ = ch.gauge_equivalent(proj, q, tol)
        worst = max(worst, r)
    return worst <= tol, worst


def _find_comp_with_labels(sym: SpaceSymbol, labels):
    want = set(labels)
    for i, comp in enumerate(sym.components):
        have = {l for l, _ in comp.left + comp.right}
        if want <= have:
            return i, comp
    raise ValueError("no component carries %r" % (labels,))


def _project_through_compression(p: ChartPoint, small_chart: ModuliChart, mapping):
    """Forget the compressed handles: surviving small-chart generators
    pull back through the transfer mapping."""
    thetas = []
    gammas = []
    for label in small_chart.boundaries[1:]:
        pos = p.chart.index_of(label)
        if pos == 0:
            return None
        thetas.append(p.thetas[pos - 1])
        gammas.append(p.gammas[pos - 1])
    if small_chart.boundaries[0] != p.chart.boundaries[0]:
        return None
    handles = []
    for j in range(1, small_chart.genus + 1):
        src_a = mapping.get(("a", j), ("a", j))[1]
        handles.append(p.handles[src_a - 1])
    return ChartPoint(small_chart, tuple(thetas), tuple(gammas), tuple(handles))


# --- invariance -----------------------------------------------------------------------


def invariance_check(y1: CobSeq, y2: CobSeq, moves, ctx: Optional[EvalContext] = None,
                     seed: int = 0):
    """Evaluate two decompositions, compare normal forms, and cross
    check sampled loci; moves, when given, must carry y1 to y2.

    Returns a list of (name, passed, detail) records."""
    ctx = ctx or EvalContext()
    records = []
    if moves:
        derived = cb.apply_moves(y1, list(moves))
        if derived != y2:
            raise MoveChainInvalid("the move chain does not produce the second sequence")
        records.append(("move-chain", True, "%d moves verified" % len(moves)))
    d1 = eval2(y1, ctx.inst)
    d2 = eval2(y2, ctx.inst)
    same = equal_2morphisms(d1, d2, ctx.inst)
    records.append(("normal-forms-equal", same, ""))
    n1 = normalize_mod_equiv(d1, ctx.inst)
    n2 = normalize_mod_equiv(d2, ctx.inst)
    if same:
        checked = 0
        worst = 0.0
        for r1, r2 in zip(n1.rows, n2.rows):
            for c1, c2 in zip(r1, r2):
                if isinstance(c1, Wire):
                    continue
                got = _face_samples_agree(c1.morph, c2.morph, ctx, su2.mix_seed(seed, checked))
                if got is not None:
                    worst = max(worst, got)
                    checked += 1
        records.append(
            ("numeric-cross-check", worst <= ctx.tol,
             "%d faces sampled, worst residual %.3g" % (checked, worst))
        )
    return records


def sample_face_points(face: CorrSymbol, seed: int, budget: int):
    """Deterministic point pairs on a face's locus, as far as each kind
    supports direct sampling."""
    out = []
    for t in range(budget):
        s = su2.mix_seed(seed, t)
        if face.kind == "diagonal":
            pts = [component_points(sym, su2.mix_seed(s, j)) for j, sym in enumerate(face.src)]
            out.append((pts, pts))
        elif face.kind == "zero_section":
            side = face.src if face.transposed else face.tgt
            pts = [component_points(sym, su2.mix_seed(s, j), zero_thetas=True) for j, sym in enumerate(side)]
            if face.transposed:
                out.append((pts, []))
            else:
                out.append(([], pts))
        elif face.kind == "hol_trivial":
            big = face.big_side[0]
            mapping = {small: big_gen for small, big_gen in face.transfer}
            by_comp: dict = {}
            for w in face.words:
                by_comp.setdefault(w.comp, []).append(w)
            big_pts = {}
            for i, comp in enumerate(big.components):
                words = by_comp.get(i, [])
                big_pts[i] = ch.sample_on_locus(chart_for(comp), words, su2.mix_seed(s, i))
            small_side = face.tgt if not face.transposed else face.src
            small_pts = []
            for sym in small_side:
                spts = {}
                for i, comp in enumerate(sym.components):
                    proj = _project_through_compression(
                        big_pts[_find_comp_with_labels(big, chart_for(comp).boundaries)[0]],
                        chart_for(comp),
                        mapping,
                    )
                    if proj is None:
                        raise ch.SamplingFailed("projection failed")
                    spts[i] = proj
                small_pts.append(spts)
            if face.transposed:
                out.append((small_pts, [big_pts]))
            else:
                out.append(([big_pts], small_pts))
        else:
            return []
    return out


def _face_samples_agree(f1: CorrSymbol, f2: CorrSymbol, ctx: EvalContext, seed: int):
    try:
        pairs = sample_face_points(f1, seed, max(1, ctx.samples // 20))
    except (ch.SamplingFailed, NotImplementedError):
        return None
    if not pairs:
        return None
    worst = 0.0
    for src_pts, tgt_pts in pairs:
        ok1, r1 = membership(f1, src_pts, tgt_pts, ctx.tol)
        ok2, r2 = membership(f2, src_pts, tgt_pts, ctx.tol)
        worst = max(worst, r1, r2)
    return worst
