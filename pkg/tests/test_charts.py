import math

import pytest

from cobord2 import charts as ch
from cobord2 import su2
from cobord2.charts import (
    ChartPoint,
    ConstraintViolated,
    ModuliChart,
    MomentMismatch,
    action,
    boundary_loop,
    chart_defect,
    eval_word,
    gauge_equivalent,
    glue,
    glue_self,
    locus_tangent,
    moment,
    random_point,
    relation_kernel_dim,
    relation_residual,
    rotate_first,
    sample_on_locus,
    solve_gauge,
    split,
    swap_adjacent,
    theta1_of,
    theta_raw,
    word_residual,
)
from cobord2.su2 import AlgVector, BranchError, ONE, mix_seed, sample_haar
from cobord2.words import Word, gen


def mk_chart(g, k, incoming=()):
    return ModuliChart(g, tuple("c%d" % i for i in range(1, k + 1)), frozenset(incoming))


GRID = [(g, k) for g in (0, 1, 2) for k in (1, 2, 3)]


def test_dimension_formula():
    for g, k in GRID:
        assert mk_chart(g, k).dim == 6 * g + 6 * k - 6


def test_trivial_point_has_zero_theta1():
    chart = mk_chart(1, 2)
    p = ChartPoint(
        chart, (AlgVector(0, 0, 0),), (ONE,), ((ONE, ONE),)
    )
    assert theta1_of(p) == AlgVector(0, 0, 0)
    assert all(t.norm() == 0 for t in moment(p))


def test_theta1_closed_form_annulus():
    chart = mk_chart(0, 2)
    p = ChartPoint(chart, (AlgVector(0.3, 0, 0),), (ONE,), ())
    t1 = theta1_of(p)
    assert su2.vec_dist(t1, AlgVector(-0.3, 0, 0)) < 1e-15


def test_relation_residual_small_over_grid():
    for g, k in GRID:
        chart = mk_chart(g, k)
        for trial in range(50):
            p = random_point(chart, mix_seed(1000, g, k, trial))
            assert relation_residual(p) < 1e-10


def test_moment_in_open_ball():
    for g, k in GRID:
        chart = mk_chart(g, k, incoming=("c1",))
        for trial in range(20):
            p = random_point(chart, mix_seed(2000, g, k, trial))
            for t in moment(p):
                assert t.norm() < math.pi


def test_action_identity_and_composition():
    for g, k in GRID:
        chart = mk_chart(g, k)
        for trial in range(25):
            p = random_point(chart, mix_seed(3000, g, k, trial))
            assert ch.point_distance(action((ONE,) * k, p), p) == 0.0
            gs = tuple(sample_haar(mix_seed(3100, g, k, trial, i)) for i in range(k))
            hs = tuple(sample_haar(mix_seed(3200, g, k, trial, i)) for i in range(k))
            gh = tuple(su2.mul(a, b) for a, b in zip(gs, hs))
            lhs = action(gh, p)
            rhs = action(gs, action(hs, p))
            assert ch.point_distance(lhs, rhs) < 1e-10


def test_moment_equivariance():
    for g, k in GRID:
        chart = mk_chart(g, k)
        for trial in range(25):
            p = random_point(chart, mix_seed(4000, g, k, trial))
            gs = tuple(sample_haar(mix_seed(4100, g, k, trial, i)) for i in range(k))
            lhs = moment(action(gs, p))
            rhs = tuple(su2.adjoint(gi, t) for gi, t in zip(gs, moment(p)))
            assert max(su2.vec_dist(a, b) for a, b in zip(lhs, rhs)) < 1e-9


def test_rotate_first_preserves_relation_and_thetas():
    chart = mk_chart(2, 3)
    for trial in range(20):
        p = random_point(chart, mix_seed(5000, trial))
        for pos in (1, 2):
            q = rotate_first(p, pos)
            assert relation_residual(q) < 1e-9
            # boundary values travel with their labels
            for label in chart.boundaries:
                assert su2.vec_dist(theta_raw(q, label), theta_raw(p, label)) < 1e-9


def test_swap_adjacent_preserves_relation():
    chart = mk_chart(1, 3)
    for trial in range(20):
        p = random_point(chart, mix_seed(6000, trial))
        q = swap_adjacent(p, 1)
        assert relation_residual(q) < 1e-9
        for label in chart.boundaries:
            assert su2.vec_dist(theta_raw(q, label), theta_raw(p, label)) < 1e-10


def test_chart_move_inverses():
    chart = ModuliChart(2, ("c1", "c2", "c3", "c4"), frozenset(("c2",)))
    for trial in range(20):
        p = random_point(chart, mix_seed(31337, trial))
        for pos in (1, 2, 3):
            q = ch.rotate_first_inv(rotate_first(p, pos), pos)
            assert ch.point_distance(p, q) < 1e-10
        for pos in (1, 2):
            q = ch.swap_adjacent_inv(swap_adjacent(p, pos), pos)
            assert ch.point_distance(p, q) < 1e-10


def test_gauge_solver_recovers_action():
    for g, k in GRID:
        chart = mk_chart(g, k)
        for trial in range(10):
            p = random_point(chart, mix_seed(7000, g, k, trial))
            gs = tuple(sample_haar(mix_seed(7100, g, k, trial, i)) for i in range(k))
            q = action(gs, p)
            ok, residual, _ = gauge_equivalent(p, q, tol=1e-8)
            assert ok, (g, k, trial, residual)


def _matched_pair(seed, chart1, chart2, label_a, label_b):
    """Two points whose signed moments match on the glued pair."""
    p1 = random_point(chart1, mix_seed(seed, 1))
    p2 = random_point(chart2, mix_seed(seed, 2))
    # overwrite p2's theta at label_b with the negated value from p1
    target = su2.vec_neg(theta_raw(p1, label_a))
    pos = chart2.index_of(label_b)
    assert pos > 0
    thetas = list(p2.thetas)
    thetas[pos - 1] = target
    return p1, ChartPoint(chart2, tuple(thetas), p2.gammas, p2.handles)


def test_glue_split_round_trip_cross():
    chart1 = ModuliChart(1, ("x1", "x2"), frozenset(("x1",)))
    chart2 = ModuliChart(0, ("y1", "x2", "y2"), frozenset(("x2",)))
    bad = 0
    for trial in range(200):
        p1, p2 = _matched_pair(mix_seed(8000, trial), chart1, chart2, "x2", "x2")
        try:
            glued, recipe = glue(p1, "x2", p2, "x2")
        except BranchError:
            bad += 1
            continue
        assert relation_residual(glued) < 1e-10
        s1, s2 = split(glued, recipe)
        ok1, r1, _ = gauge_equivalent(s1, p1, tol=1e-8)
        ok2, r2, _ = gauge_equivalent(s2, p2, tol=1e-8)
        assert ok1 and ok2, (trial, r1, r2)
    assert bad < 20


def test_glue_handle_disc_onto_annulus():
    # capping with a one-boundary piece exercises the swapped-role path
    disc = ModuliChart(1, ("m",), frozenset())
    ann = ModuliChart(0, ("out", "m"), frozenset(("m",)))
    for trial in range(50):
        p1 = random_point(disc, mix_seed(8600, trial, 1))
        p2 = random_point(ann, mix_seed(8600, trial, 2))
        target = su2.vec_neg(theta1_of(p1))
        p2 = ChartPoint(ann, (target,), p2.gammas, p2.handles)
        glued, recipe = glue(p1, "m", p2, "m")
        assert glued.chart.k == 1
        assert glued.chart.genus == 1
        assert relation_residual(glued) < 1e-10


def test_glue_moment_mismatch_raises():
    chart1 = ModuliChart(0, ("a1", "m"), frozenset())
    chart2 = ModuliChart(0, ("b1", "m"), frozenset(("m",)))
    p1 = random_point(chart1, 1)
    p2 = random_point(chart2, 2)
    with pytest.raises(MomentMismatch):
        glue(p1, "m", p2, "m")


def test_glue_self_round_trip():
    chart = ModuliChart(0, ("keep", "sa", "sb"), frozenset(("sa",)))
    done = 0
    for trial in range(200):
        p = random_point(chart, mix_seed(8800, trial))
        target = su2.vec_neg(theta_raw(p, "sa"))
        thetas = list(p.thetas)
        thetas[chart.index_of("sb") - 1] = target
        p = ChartPoint(chart, tuple(thetas), p.gammas, p.handles)
        try:
            glued, recipe = glue_self(p, "sa", "sb")
        except BranchError:
            continue
        assert glued.chart.genus == 1 and glued.chart.k == 1
        assert relation_residual(glued) < 1e-10
        back = split(glued, recipe)
        ok, r, _ = gauge_equivalent(back, p, tol=1e-8)
        assert ok, (trial, r)
        done += 1
    assert done > 150


def test_glued_points_avoid_excluded_locus():
    chart1 = ModuliChart(0, ("a1", "m"), frozenset())
    chart2 = ModuliChart(0, ("b1", "m"), frozenset(("m",)))
    for trial in range(100):
        p1, p2 = _matched_pair(mix_seed(9000, trial), chart1, chart2, "m", "m")
        glued, _ = glue(p1, "m", p2, "m")
        assert ch.is_admissible(glued)


def test_relation_kernel_dimension():
    for g, k in GRID:
        chart = mk_chart(g, k)
        for trial in range(5):
            p = random_point(chart, mix_seed(9500, g, k, trial))
            kdim, rank = relation_kernel_dim(p)
            assert rank == 3
            assert kdim == chart.dim


def test_single_word_cuts_rank_three():
    chart = mk_chart(1, 1)
    w = Word(0, (gen("a", 1),))
    for trial in range(20):
        p = sample_on_locus(chart, [w], mix_seed(9600, trial))
        frame = locus_tangent(p, [w])
        assert frame.rank == 3
        assert len(frame.vectors) == chart.dim - 3


def test_two_transverse_words_cut_rank_six():
    chart = mk_chart(1, 1)
    words = [Word(0, (gen("a", 1),)), Word(0, (gen("b", 1),))]
    for trial in range(20):
        p = sample_on_locus(chart, words, mix_seed(9700, trial))
        frame = locus_tangent(p, words)
        assert frame.rank == 6
        assert len(frame.vectors) == chart.dim - 6


def test_no_constraints_full_frame():
    chart = mk_chart(1, 2)
    p = random_point(chart, 5)
    frame = locus_tangent(p, [])
    assert frame.rank == 0
    assert len(frame.vectors) == chart.dim


def test_generic_word_newton_sampling():
    chart = mk_chart(2, 1)
    w = Word(0, (gen("a", 1), gen("b", 2)))
    for trial in range(5):
        p = sample_on_locus(chart, [w], mix_seed(9800, trial))
        assert word_residual(p, w) < 1e-9


def test_constraint_violated_raises():
    chart = mk_chart(1, 1)
    w = Word(0, (gen("a", 1),))
    for trial in range(50):
        p = random_point(chart, mix_seed(9900, trial))
        if word_residual(p, w) > 1e-3:
            with pytest.raises(ConstraintViolated):
                locus_tangent(p, [w])
            return
    raise AssertionError("no generic point found")


def test_zero_section_sampling():
    chart = mk_chart(0, 3)
    p = random_point(chart, 7, zero_thetas=True)
    assert all(t.norm() == 0 for t in p.thetas)
    assert theta1_of(p).norm() < 1e-12


def test_flatten_round_trip_bit_exact():
    chart = mk_chart(2, 3, incoming=("c1",))
    for trial in range(10):
        p = random_point(chart, mix_seed(9980, trial))
        flat = ch.flatten_point(p)
        assert len(flat) == 3 * 2 + 4 * 2 + 8 * 2
        q = ch.unflatten_point(chart, flat)
        assert q == p  # exact, not approximate


def test_cotangent_moment_formula():
    # the closed-form moments match the pairing of the covector with
    # the finite-difference infinitesimal action, and transform
    # equivariantly
    def pair(u, v):
        return u.a * v.a + u.b * v.b + u.c * v.c

    for trial in range(200):
        s = mix_seed(9990, trial)
        g = sample_haar(mix_seed(s, 1))
        eta = su2.sample_ball(math.pi, mix_seed(s, 2))
        xi = su2.sample_ball(1.0, mix_seed(s, 3))
        mu_left, mu_right = ch.cotangent_moment(g, eta)
        # <mu_L, xi> = <eta, the left field at g read in the fiber>
        field = ch.infinitesimal_translation(g, xi)
        assert abs(pair(mu_left, xi) - pair(eta, field)) < 1e-6
        assert su2.vec_dist(mu_right, su2.vec_neg(eta)) == 0.0
        # equivariance of the left moment under left translation
        h = sample_haar(mix_seed(s, 4))
        moved, _ = ch.cotangent_moment(su2.mul(h, g), eta)
        assert su2.vec_dist(moved, su2.adjoint(h, mu_left)) < 1e-12


def test_zero_section_locus_half_dimension():
    # on a k-punctured sphere the all-theta-zero locus has dimension
    # 3(k-1), half of 6k-6
    for k in (2, 3, 4):
        chart = mk_chart(0, k)
        words = [Word(0, (gen("d", "c%d" % i),)) for i in range(2, k + 1)]
        for trial in range(10):
            p = sample_on_locus(chart, words, mix_seed(9950, k, trial))
            frame = locus_tangent(p, words)
            assert frame.rank == 3 * (k - 1)
            assert len(frame.vectors) == chart.dim - 3 * (k - 1)
            assert len(frame.vectors) == 3 * (k - 1)
