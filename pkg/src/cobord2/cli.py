"""Command-line driver.

    cobord2 axioms <file.cat> [--depth N] [--seed S]
    cobord2 moduli [--grid g,k ...] [--trials N] [--seed S]
    cobord2 functor (eval|invariance) <file.cdf>

Every command writes a deterministic JSON report to stdout (or --out)
and a human summary with wall time to stderr.  Exit codes: 0 all
checks pass, 1 at least one failed, 2 unreadable input.  COBORD2_SEED
overrides the configured seed; an explicit --seed flag wins over the
environment."""

from __future__ import annotations

import argparse
import os
import sys
import time

from cobord2 import bisets as bs
from cobord2 import catalog as cat
from cobord2 import cdf
from cobord2 import charts as ch
from cobord2 import cobordism as cb
from cobord2 import functor as fn
from cobord2 import su2
from cobord2.diagram import check_diagram_axiom
from cobord2.report import RunConfig, VerificationReport, report_json
from cobord2.symcat import HamInstance, normalize_mod_equiv


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="cobord2")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--out", type=str, default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    p_ax = sub.add_parser("axioms", parents=[common],
                          help="composition-loop identities over a finite catalog")
    p_ax.add_argument("catalog", type=str)
    p_ax.add_argument("--depth", type=int, default=None)

    p_mod = sub.add_parser("moduli", parents=[common], help="numerical chart suites")
    p_mod.add_argument("--grid", type=str, nargs="*", default=None, metavar="g,k")
    p_mod.add_argument("--trials", type=int, default=1000)
    p_mod.add_argument("--samples", type=int, default=100)
    p_mod.add_argument("--tol-residual", type=float, default=1e-9)
    p_mod.add_argument("--tol-svd", type=float, default=1e-8)
    p_mod.add_argument("--dump-points", action="store_true",
                       help="embed one seeded chart point per grid entry as a flat array")

    p_fun = sub.add_parser("functor", parents=[common],
                           help="evaluate or compare decomposed cobordisms")
    p_fun.add_argument("mode", choices=("eval", "invariance"))
    p_fun.add_argument("cdf", type=str)
    p_fun.add_argument("--samples", type=int, default=100)

    args = parser.parse_args(argv)
    seed = args.seed
    if seed is None:
        env = os.environ.get("COBORD2_SEED")
        seed = int(env) if env else 0

    started = time.monotonic()
    try:
        if args.command == "axioms":
            report = cmd_axioms(args, seed)
        elif args.command == "moduli":
            report = cmd_moduli(args, seed)
        else:
            report = cmd_functor(args, seed)
    except (cdf.ParseError, OSError) as err:
        print("error: %s" % err, file=sys.stderr)
        return 2
    report.wall_time = time.monotonic() - started

    payload = report_json(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)
    counts = report.counts()
    print(
        "%s: %d pass, %d fail, %d unknown in %.2fs"
        % (report.suite, counts["pass"], counts["fail"], counts["unknown"], report.wall_time),
        file=sys.stderr,
    )
    return 0 if report.passed else 1


def cmd_axioms(args, seed) -> VerificationReport:
    with open(args.catalog, "r", encoding="utf-8") as fh:
        doc = cdf.parse_catalog(fh.read())
    depth = args.depth if args.depth is not None else doc.depth
    config = RunConfig(seed=seed, trials=1, depth=depth)
    report = VerificationReport("axioms", config)
    inst = bs.LieRInstance(tuple(doc.bisets.values()))
    sequences = doc.sequences or cat.loop_start_sequences(inst.catalog)
    total_loops = 0
    for items in sequences:
        try:
            start = inst.seq(items)
        except Exception:
            continue
        loops = cat.enumerate_loops(inst, items, depth)
        for loop_idx, loop in enumerate(loops):
            seqs = [bs.SeqMorphism(start.source, start.target, s) for s in loop]
            results = check_diagram_axiom(seqs, inst)
            total_loops += 1
            bad = [name for name, ok, _ in results if not ok]
            name = "loop/%s/%d" % ("+".join(m.name for m in items), loop_idx)
            report.add(name, not bad, seed=seed,
                       detail="" if not bad else "failed probes: %s" % ",".join(bad))
    # an empty catalog passes trivially: there is nothing to refute
    report.add("loops-enumerated", True, detail="%d loops" % total_loops)
    return report


def _parse_grid(tokens):
    out = []
    for tok in tokens:
        g, k = tok.split(",")
        out.append((int(g), int(k)))
    return tuple(out)


def cmd_moduli(args, seed) -> VerificationReport:
    grid = _parse_grid(args.grid) if args.grid else RunConfig().grid
    config = RunConfig(
        seed=seed,
        trials=args.trials,
        residual_tol=args.tol_residual,
        svd_rtol=args.tol_svd,
        grid=grid,
        samples=args.samples,
    )
    report = VerificationReport("moduli", config)
    for g, k in grid:
        _suite_dimension(report, g, k, config)
        _suite_equivariance(report, g, k, config)
        _suite_round_trip(report, g, k, config)
        _suite_ranks(report, g, k, config)
        if args.dump_points:
            p = ch.random_point(_grid_chart(g, k), su2.mix_seed(config.seed, 99, g, k))
            flat = ",".join(format(v, ".17g") for v in ch.flatten_point(p))
            report.add("point-dump/g%d.k%d" % (g, k), True, seed=config.seed, detail=flat)
    return report


def _grid_chart(g, k):
    labels = tuple("c%d" % i for i in range(1, k + 1))
    return ch.ModuliChart(g, labels, frozenset(labels[: (k + 1) // 2]))


def _suite_dimension(report, g, k, config):
    chart = _grid_chart(g, k)
    want = 6 * g + 6 * k - 6
    bad = 0
    for t in range(config.samples):
        p = ch.random_point(chart, su2.mix_seed(config.seed, 10, g, k, t))
        kdim, rank = ch.relation_kernel_dim(p, rtol=config.svd_rtol)
        if kdim != want or rank != 3:
            bad += 1
    report.add(
        "dimension/g%d.k%d" % (g, k), bad == 0, residual=float(bad), seed=config.seed,
        detail="%d points, kernel dim %d expected" % (config.samples, want),
    )


def _suite_equivariance(report, g, k, config):
    chart = _grid_chart(g, k)
    worst = 0.0
    for t in range(config.trials):
        s = su2.mix_seed(config.seed, 20, g, k, t)
        p = ch.random_point(chart, s)
        gs = tuple(su2.sample_haar(su2.mix_seed(s, i)) for i in range(k))
        lhs = ch.moment(ch.action(gs, p))
        rhs = tuple(su2.adjoint(gi, m) for gi, m in zip(gs, ch.moment(p)))
        worst = max(worst, max(su2.vec_dist(a, b) for a, b in zip(lhs, rhs)))
    report.add(
        "equivariance/g%d.k%d" % (g, k), worst < config.residual_tol,
        residual=worst, seed=config.seed, detail="%d trials" % config.trials,
    )


def _suite_round_trip(report, g, k, config):
    chart1 = _grid_chart(g, k)
    glue_label = chart1.boundaries[-1]
    opposite_in = glue_label not in chart1.incoming
    partner = ch.ModuliChart(
        0, ("pp1", glue_label),
        frozenset((glue_label,)) if opposite_in else frozenset(),
    )
    worst = 0.0
    relation_worst = 0.0
    hits = 0
    for t in range(config.trials):
        s = su2.mix_seed(config.seed, 30, g, k, t)
        p1 = ch.random_point(chart1, su2.mix_seed(s, 1))
        p2 = ch.random_point(partner, su2.mix_seed(s, 2))
        target = su2.vec_neg(ch.theta_raw(p1, glue_label))
        pos = partner.index_of(glue_label)
        thetas = list(p2.thetas)
        thetas[pos - 1] = target
        p2 = ch.ChartPoint(partner, tuple(thetas), p2.gammas, p2.handles)
        try:
            glued, recipe = ch.glue(p1, glue_label, p2, glue_label)
        except su2.BranchError:
            hits += 1
            continue
        relation_worst = max(relation_worst, ch.relation_residual(glued))
        back1, back2 = ch.split(glued, recipe)
        if back1.chart != p1.chart:
            back1, back2 = back2, back1  # gluing a one-boundary piece swaps roles
        _, r1, _ = ch.gauge_equivalent(back1, p1)
        _, r2, _ = ch.gauge_equivalent(back2, p2)
        worst = max(worst, r1, r2)
    ok = worst < config.residual_tol and relation_worst < 1e-10
    report.add(
        "round-trip/g%d.k%d" % (g, k), ok, residual=worst, seed=config.seed,
        detail="%d trials, %d excluded-locus rejections, relation %.3g"
        % (config.trials, hits, relation_worst),
    )


def _suite_ranks(report, g, k, config):
    from cobord2.words import Word

    if g < 1:
        return
    chart = _grid_chart(g, k)
    word = Word(0, (("a", 1, 1),))
    good = 0
    rejects = 0
    for t in range(config.samples):
        s = su2.mix_seed(config.seed, 40, g, k, t)
        try:
            p = ch.sample_on_locus(chart, [word], s)
        except ch.SamplingFailed:
            rejects += 1
            continue
        frame = ch.locus_tangent(p, [word], rtol=config.svd_rtol)
        if frame.rank == 3 and len(frame.vectors) == chart.dim - 3:
            good += 1
        else:
            rejects += 1
    report.add(
        "coisotropic-rank/g%d.k%d" % (g, k), good >= int(0.95 * config.samples),
        residual=float(rejects), seed=config.seed,
        detail="%d of %d clean rank-3 points, %d rejects reported"
        % (good, config.samples, rejects),
    )


def cmd_functor(args, seed) -> VerificationReport:
    with open(args.cdf, "r", encoding="utf-8") as fh:
        doc = cdf.parse_cdf(fh.read())
    config = RunConfig(seed=seed, trials=1, samples=args.samples)
    report = VerificationReport("functor-%s" % args.mode, config)
    seq = doc.sequence()
    problems = cb.validate(seq)
    if problems:
        raise cdf.ParseError("; ".join(problems))
    inst = HamInstance()
    if args.mode == "eval":
        diagram = fn.eval2(seq, inst)
        normal = normalize_mod_equiv(diagram, inst)
        report.add("evaluation", True, seed=seed,
                   detail="faces %d, normal faces %d" % (diagram.face_count(), normal.face_count()))
        for i, row in enumerate(normal.rows):
            for cell in row:
                if hasattr(cell, "morph"):
                    report.add("normal-form/row%d" % i, True, detail=cell.morph.kind)
        return report
    moves = list(doc.moves)
    if doc.steps2:
        y2 = doc.steps2
    else:
        try:
            y2 = cb.apply_moves(seq, moves)
        except cb.PatternMismatch as err:
            raise cdf.ParseError("move chain does not apply: %s" % err)
    ctx = fn.EvalContext(inst=inst, samples=config.samples)
    try:
        records = fn.invariance_check(seq, y2, moves if not doc.steps2 else [], ctx, seed=seed)
    except cb.MoveChainInvalid as err:
        report.add("invariance/move-chain", False, seed=seed, detail=str(err))
        return report
    for name, ok, detail in records:
        report.add("invariance/%s" % name, ok, seed=seed, detail=detail)
    return report


if __name__ == "__main__":
    sys.exit(main())
