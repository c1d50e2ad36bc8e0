"""Numerical holonomy charts for moduli of flat SU(2) connections on a
surface with boundary.

A connected surface of genus g with k >= 1 labeled boundary circles is
charted by tuples

    (theta_2 .. theta_k, Gamma_2 .. Gamma_k, A_1, B_1 .. A_g, B_g)

with theta_i in the open ball of radius pi, Gamma_i and A_j, B_j unit
quaternions.  theta_i is the boundary value at circle i, Gamma_i the
holonomy of an arc from the basepoint (on circle 1) to circle i, and
A_j, B_j the handle holonomies.  Writing c_i = Gamma_i e^{theta_i}
Gamma_i^{-1}, the first boundary value is determined by

    e^{theta_1} c_2 ... c_k [A_1,B_1] ... [A_g,B_g] = 1,

and a tuple is admissible when the product after e^{theta_1} stays away
from -1, so theta_1 = log of its inverse is well defined.

Conventions fixed here (validated by the action axioms, moment
equivariance, and glue/split round trips, since only the topological
description is canonical):

* group action by a tuple (g_1 .. g_k), one per boundary in chart
  order: A, B -> g_1 () g_1^-1, Gamma_i -> g_1 Gamma_i g_i^-1,
  theta_i -> Ad_{g_i} theta_i;
* moment = per-boundary theta with sign +1 on incoming and -1 on
  outgoing circles, so gluing matches moments by literal equality;
* cross-gluing attaches the second chart's arcs and handles through
  the last arc of the first chart, with the second chart's handles
  listed first; self-gluing creates the handle pair
  A* = Gamma_a e^{theta_a} Gamma_b^{-1}, B* = Gamma_b Gamma_a^{-1}
  listed first.  Splitting inverts these words with the gauge choice
  Gamma_glued = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from cobord2 import su2
from cobord2.su2 import (
    AlgVector,
    BranchError,
    ONE,
    UnitQuaternion,
    adjoint,
    commutator,
    exp_su2,
    inv,
    log_su2,
    mix_seed,
    mul,
    sample_ball,
    sample_haar,
)
from cobord2.words import Word

FD_STEP = 1e-6
SVD_RTOL = 1e-8
ADMISSIBLE_MARGIN = 1e-6


class MomentMismatch(ValueError):
    pass


class ConstraintViolated(ValueError):
    pass


class SamplingFailed(RuntimeError):
    pass


@dataclass(frozen=True)
class ModuliChart:
    genus: int
    boundaries: tuple  # circle labels, chart order; index 0 carries the basepoint
    incoming: frozenset = frozenset()

    def __post_init__(self):
        if self.genus < 0 or len(self.boundaries) < 1:
            raise ValueError("chart needs genus >= 0 and k >= 1")
        if len(set(self.boundaries)) != len(self.boundaries):
            raise ValueError("duplicate boundary labels")

    @property
    def k(self) -> int:
        return len(self.boundaries)

    @property
    def dim(self) -> int:
        return 6 * self.genus + 6 * self.k - 6

    def index_of(self, label: str) -> int:
        return self.boundaries.index(label)

    def sign(self, label: str) -> int:
        return 1 if label in self.incoming else -1


@dataclass(frozen=True)
class ChartPoint:
    chart: ModuliChart
    thetas: tuple   # AlgVector per boundary 1..k-1
    gammas: tuple   # UnitQuaternion per boundary 1..k-1
    handles: tuple  # (A_j, B_j) pairs, j = 1..genus

    def __post_init__(self):
        if len(self.thetas) != self.chart.k - 1 or len(self.gammas) != self.chart.k - 1:
            raise ValueError("wrong number of boundary coordinates")
        if len(self.handles) != self.chart.genus:
            raise ValueError("wrong number of handle pairs")


def boundary_loop(p: ChartPoint, pos: int) -> UnitQuaternion:
    """Holonomy of the loop around boundary pos (>= 1) based at the
    basepoint: Gamma e^theta Gamma^-1."""
    g = p.gammas[pos - 1]
    return mul(mul(g, exp_su2(p.thetas[pos - 1])), inv(g))


def chart_defect(p: ChartPoint) -> UnitQuaternion:
    """The product c_2 ... c_k [A_1,B_1] ... [A_g,B_g]; admissibility
    is this staying away from -1."""
    factors = [boundary_loop(p, i) for i in range(1, p.chart.k)]
    factors.extend(commutator(a, b) for a, b in p.handles)
    return su2.product(factors)


def is_admissible(p: ChartPoint, margin: float = su2.BRANCH_EPS) -> bool:
    return not su2.near_minus_one(chart_defect(p), margin)


def theta1_of(p: ChartPoint) -> AlgVector:
    """The determined first boundary value; BranchError on the excluded
    locus."""
    return log_su2(inv(chart_defect(p)))


def relation_residual(p: ChartPoint) -> float:
    """|e^{theta_1} c_2 ... c_k [A,B]... - 1|; zero by construction up
    to rounding."""
    return su2.quat_dist(mul(exp_su2(theta1_of(p)), chart_defect(p)), ONE)


def theta_raw(p: ChartPoint, label: str) -> AlgVector:
    pos = p.chart.index_of(label)
    if pos == 0:
        return theta1_of(p)
    return p.thetas[pos - 1]


def moment(p: ChartPoint) -> tuple:
    """Signed boundary values in chart order: +theta on incoming
    circles, -theta on outgoing ones."""
    out = []
    for label in p.chart.boundaries:
        t = theta_raw(p, label)
        if p.chart.sign(label) < 0:
            t = su2.vec_neg(t)
        out.append(t)
    return tuple(out)


def action(gs, p: ChartPoint) -> ChartPoint:
    """SU(2)^k action, one factor per boundary in chart order."""
    if len(gs) != p.chart.k:
        raise ValueError("need one group element per boundary")
    g1 = gs[0]
    thetas = tuple(adjoint(gs[i], t) for i, t in enumerate(p.thetas, start=1))
    gammas = tuple(mul(mul(g1, gm), inv(gs[i])) for i, gm in enumerate(p.gammas, start=1))
    handles = tuple(
        (mul(mul(g1, a), inv(g1)), mul(mul(g1, b), inv(g1))) for a, b in p.handles
    )
    return ChartPoint(p.chart, thetas, gammas, handles)


def random_point(chart: ModuliChart, seed: int, zero_thetas: bool = False) -> ChartPoint:
    """Admissible point with ball-uniform thetas and Haar holonomies;
    deterministic in the seed, resampling away from the excluded locus."""
    for trial in range(64):
        s = mix_seed(seed, trial)
        thetas = tuple(
            AlgVector(0.0, 0.0, 0.0) if zero_thetas else sample_ball(math.pi, mix_seed(s, 1, i))
            for i in range(chart.k - 1)
        )
        gammas = tuple(sample_haar(mix_seed(s, 2, i)) for i in range(chart.k - 1))
        handles = tuple(
            (sample_haar(mix_seed(s, 3, j)), sample_haar(mix_seed(s, 4, j)))
            for j in range(chart.genus)
        )
        p = ChartPoint(chart, thetas, gammas, handles)
        if is_admissible(p, ADMISSIBLE_MARGIN):
            return p
    raise SamplingFailed("no admissible point found, seed %d" % seed)


# --- chart moves ----------------------------------------------------------------


def rotate_first(p: ChartPoint, pos: int) -> ChartPoint:
    """Chart change making boundary pos (>= 1) the basepoint boundary;
    new boundary order is the cyclic rotation starting at pos."""
    k = p.chart.k
    if not 1 <= pos < k:
        raise ValueError("rotation position out of range")
    gi = p.gammas[pos - 1]
    gi_inv = inv(gi)

    def conj(q):
        return mul(mul(gi_inv, q), gi)

    handles = tuple((conj(a), conj(b)) for a, b in p.handles)
    kq = ONE
    for a, b in handles:
        kq = mul(kq, commutator(a, b))
    old_theta1 = theta1_of(p)
    new_order = p.chart.boundaries[pos:] + p.chart.boundaries[:pos]
    thetas = []
    gammas = []
    for j in range(pos + 1, k):  # boundaries after pos keep their arcs
        thetas.append(p.thetas[j - 1])
        gammas.append(mul(gi_inv, p.gammas[j - 1]))
    # old basepoint boundary, then the rest, pushed past the commutators
    thetas.append(old_theta1)
    gammas.append(mul(kq, gi_inv))
    for j in range(1, pos):
        thetas.append(p.thetas[j - 1])
        gammas.append(mul(kq, mul(gi_inv, p.gammas[j - 1])))
    chart = ModuliChart(p.chart.genus, new_order, p.chart.incoming)
    return ChartPoint(chart, tuple(thetas), tuple(gammas), handles)


def rotate_first_inv(q: ChartPoint, pos: int) -> ChartPoint:
    """Inverse of rotate_first(_, pos): rotations are mapping-class
    moves, not involutions, so gluing records them and splitting undoes
    them explicitly."""
    k = q.chart.k
    if not 1 <= pos < k:
        raise ValueError("rotation position out of range")
    kq = ONE
    for a, b in q.handles:
        kq = mul(kq, commutator(a, b))
    # the old basepoint boundary sits at new position k - pos with arc
    # holonomy K Gamma_i^-1
    gi = inv(mul(inv(kq), q.gammas[k - pos - 1]))
    gi_inv = inv(gi)

    def unconj(x):
        return mul(mul(gi, x), gi_inv)

    handles = tuple((unconj(a), unconj(b)) for a, b in q.handles)
    theta_i = theta1_of(q)
    thetas = [None] * (k - 1)
    gammas = [None] * (k - 1)
    thetas[pos - 1] = theta_i
    gammas[pos - 1] = gi
    for newpos in range(1, k):
        oldpos = (newpos + pos) % k
        if oldpos == 0:
            continue  # the old determined boundary
        if newpos < k - pos:
            gamma_old = mul(gi, q.gammas[newpos - 1])
        else:
            gamma_old = mul(gi, mul(inv(kq), q.gammas[newpos - 1]))
        thetas[oldpos - 1] = q.thetas[newpos - 1]
        gammas[oldpos - 1] = gamma_old
    order = q.chart.boundaries[k - pos:] + q.chart.boundaries[:k - pos]
    chart = ModuliChart(q.chart.genus, order, q.chart.incoming)
    return ChartPoint(chart, tuple(thetas), tuple(gammas), handles)


def swap_adjacent(p: ChartPoint, pos: int) -> ChartPoint:
    """Chart change exchanging boundaries pos and pos+1 (both >= 1):
    the later loop moves first, the earlier one gets conjugated past it."""
    k = p.chart.k
    if not 1 <= pos < k - 1:
        raise ValueError("swap position out of range")
    i = pos - 1
    c_next = boundary_loop(p, pos + 1)
    thetas = list(p.thetas)
    gammas = list(p.gammas)
    thetas[i], thetas[i + 1] = thetas[i + 1], thetas[i]
    gammas[i], gammas[i + 1] = gammas[i + 1], mul(inv(c_next), gammas[i])
    order = list(p.chart.boundaries)
    order[pos], order[pos + 1] = order[pos + 1], order[pos]
    chart = ModuliChart(p.chart.genus, tuple(order), p.chart.incoming)
    return ChartPoint(chart, tuple(thetas), tuple(gammas), p.handles)


def swap_adjacent_inv(p: ChartPoint, pos: int) -> ChartPoint:
    """Inverse braid move of swap_adjacent(_, pos)."""
    k = p.chart.k
    if not 1 <= pos < k - 1:
        raise ValueError("swap position out of range")
    i = pos - 1
    c_old_next = boundary_loop(p, pos)
    thetas = list(p.thetas)
    gammas = list(p.gammas)
    thetas[i], thetas[i + 1] = thetas[i + 1], thetas[i]
    gammas[i], gammas[i + 1] = mul(c_old_next, gammas[i + 1]), gammas[i]
    order = list(p.chart.boundaries)
    order[pos], order[pos + 1] = order[pos + 1], order[pos]
    chart = ModuliChart(p.chart.genus, tuple(order), p.chart.incoming)
    return ChartPoint(chart, tuple(thetas), tuple(gammas), p.handles)


def apply_move(p: ChartPoint, move) -> ChartPoint:
    kind, pos = move
    if kind == "rot":
        return rotate_first(p, pos)
    return swap_adjacent(p, pos)


def unapply_script(p: ChartPoint, script) -> ChartPoint:
    for kind, pos in reversed(script):
        p = rotate_first_inv(p, pos) if kind == "rot" else swap_adjacent_inv(p, pos)
    return p


def _move_last(p: ChartPoint, label: str):
    """Normalize the labeled boundary to the last chart position;
    returns (point, move script)."""
    script = []
    pos = p.chart.index_of(label)
    if pos == 0:
        if p.chart.k == 1:
            return p, script
        p = rotate_first(p, 1)
        script.append(("rot", 1))
        pos = p.chart.index_of(label)
    while pos < p.chart.k - 1:
        p = swap_adjacent(p, pos)
        script.append(("swap", pos))
        pos += 1
    return p, script


def _move_first(p: ChartPoint, label: str):
    pos = p.chart.index_of(label)
    if pos == 0:
        return p, []
    return rotate_first(p, pos), [("rot", pos)]


def move_boundary_last(p: ChartPoint, label: str) -> ChartPoint:
    return _move_last(p, label)[0]


def move_boundary_first(p: ChartPoint, label: str) -> ChartPoint:
    return _move_first(p, label)[0]


# --- gluing ---------------------------------------------------------------------


@dataclass(frozen=True)
class GlueRecipe:
    kind: str  # "cross" | "self"
    chart1: ModuliChart  # normalized chart of the first piece (glued last)
    chart2: Optional[ModuliChart]  # normalized chart of the second (glued first)
    label_a: str
    label_b: str
    script1: tuple = ()  # moves that normalized the first piece
    script2: tuple = ()


def glue(p1: ChartPoint, label_a: str, p2: ChartPoint, label_b: str,
         tol: float = 1e-9):
    """Glue boundary label_a of p1 to label_b of p2 (distinct points).

    Precondition is literal equality of the signed moments on the glued
    circles.  Returns (glued point, recipe); the glued chart lists p1's
    boundaries (minus label_a) then p2's (minus label_b), and p2's
    handles before p1's.  Raises BranchError when the result lands on
    the excluded locus, which cannot happen for matched admissible
    inputs, and MomentMismatch when the moment precondition fails."""
    if p1.chart.sign(label_a) == p2.chart.sign(label_b):
        raise MomentMismatch("glued circles need opposite roles")
    if p1.chart.k == 1:
        # the basepoint piece must keep a boundary; swap roles
        glued, recipe = glue(p2, label_b, p1, label_a, tol)
        return glued, recipe
    q1, script1 = _move_last(p1, label_a)
    q2, script2 = _move_first(p2, label_b)
    m1 = theta_raw(q1, label_a)
    if q1.chart.sign(label_a) < 0:
        m1 = su2.vec_neg(m1)
    m2 = theta_raw(q2, label_b)
    if q2.chart.sign(label_b) < 0:
        m2 = su2.vec_neg(m2)
    if su2.vec_dist(m1, m2) > tol:
        raise MomentMismatch("moments differ by %g" % su2.vec_dist(m1, m2))
    gl = q1.gammas[-1]
    boundaries = q1.chart.boundaries[:-1] + q2.chart.boundaries[1:]
    incoming = (q1.chart.incoming | q2.chart.incoming) - {label_a, label_b}
    chart = ModuliChart(q1.chart.genus + q2.chart.genus, boundaries, frozenset(incoming))
    thetas = q1.thetas[:-1] + q2.thetas
    gammas = q1.gammas[:-1] + tuple(mul(gl, g) for g in q2.gammas)
    handles2 = tuple((mul(mul(gl, a), inv(gl)), mul(mul(gl, b), inv(gl))) for a, b in q2.handles)
    glued = ChartPoint(chart, thetas, gammas, handles2 + q1.handles)
    if not is_admissible(glued):
        raise BranchError("glued point lies on the excluded locus")
    recipe = GlueRecipe(
        "cross", q1.chart, q2.chart, label_a, label_b, tuple(script1), tuple(script2)
    )
    return glued, recipe


def glue_self(p: ChartPoint, label_a: str, label_b: str, tol: float = 1e-9):
    """Glue two boundaries of one connected piece; genus rises by one
    and the new handle pair is listed first."""
    if p.chart.sign(label_a) == p.chart.sign(label_b):
        raise MomentMismatch("glued circles need opposite roles")
    if p.chart.k < 3:
        raise MomentMismatch("self-gluing would close the surface")
    script = []
    if p.chart.index_of(label_a) == 0 or p.chart.index_of(label_b) == 0:
        other = [
            l for l in p.chart.boundaries if l not in (label_a, label_b)
        ][0]
        p, moves = _move_first(p, other)
        script.extend(moves)
    p, moves = _move_last(p, label_b)
    script.extend(moves)
    pos_a = p.chart.index_of(label_a)
    while pos_a < p.chart.k - 2:
        p = swap_adjacent(p, pos_a)
        script.append(("swap", pos_a))
        pos_a += 1
    k = p.chart.k
    ta, tb = p.thetas[k - 3], p.thetas[k - 2]
    ma = su2.vec_neg(ta) if p.chart.sign(label_a) < 0 else ta
    mb = su2.vec_neg(tb) if p.chart.sign(label_b) < 0 else tb
    if su2.vec_dist(ma, mb) > tol:
        raise MomentMismatch("moments differ by %g" % su2.vec_dist(ma, mb))
    ga, gb = p.gammas[k - 3], p.gammas[k - 2]
    a_star = mul(mul(ga, exp_su2(ta)), inv(gb))
    b_star = mul(gb, inv(ga))
    chart = ModuliChart(
        p.chart.genus + 1,
        p.chart.boundaries[:-2],
        p.chart.incoming - {label_a, label_b},
    )
    glued = ChartPoint(
        chart, p.thetas[:-2], p.gammas[:-2], ((a_star, b_star),) + p.handles
    )
    if not is_admissible(glued):
        raise BranchError("self-glued point lies on the excluded locus")
    recipe = GlueRecipe("self", p.chart, None, label_a, label_b, tuple(script))
    return glued, recipe


def split(q: ChartPoint, recipe: GlueRecipe, tol: float = 1e-9):
    """Invert glue/glue_self with the gauge choice Gamma_glued = 1.

    Returns (p1, p2) for a cross recipe and a single point for a self
    recipe, undoing the recipe's normalization moves so the points come
    back in the charts glue was fed; the originals are recovered up to
    one SU(2) gauge factor at the glued circle.  Raises BranchError on
    the excised locus, where the glued circle's holonomy is -1 and no
    boundary value in the open ball exists."""
    if recipe.kind == "self":
        chart = recipe.chart1
        a_star, b_star = q.handles[0]
        theta_a = log_su2(mul(b_star, a_star))
        thetas = q.thetas + (theta_a, su2.vec_neg(theta_a))
        gammas = q.gammas + (inv(b_star), ONE)
        back = ChartPoint(chart, thetas, gammas, q.handles[1:])
        return unapply_script(back, recipe.script1)
    chart1, chart2 = recipe.chart1, recipe.chart2
    k1, g2 = chart1.k, chart2.genus
    thetas1 = q.thetas[: k1 - 2]
    gammas1 = q.gammas[: k1 - 2]
    thetas2 = q.thetas[k1 - 2:]
    gammas2 = q.gammas[k1 - 2:]
    handles2 = q.handles[:g2]
    handles1 = q.handles[g2:]
    # piece 1's relation e^{theta_1} c_2..c_{k1-1} e^{theta_last} K1 = 1
    # determines its last boundary value once Gamma_last = 1
    ahead = ONE
    for t, g in zip(thetas1, gammas1):
        ahead = mul(ahead, mul(mul(g, exp_su2(t)), inv(g)))
    kq = ONE
    for a, b in handles1:
        kq = mul(kq, commutator(a, b))
    theta1 = theta1_of(q)
    c_last = mul(inv(ahead), mul(exp_su2(su2.vec_neg(theta1)), inv(kq)))
    theta_last = log_su2(c_last)
    p1 = ChartPoint(chart1, thetas1 + (theta_last,), gammas1 + (ONE,), handles1)
    p2 = ChartPoint(chart2, thetas2, gammas2, handles2)
    return unapply_script(p1, recipe.script1), unapply_script(p2, recipe.script2)


# --- serialization ----------------------------------------------------------------


def flatten_point(p: ChartPoint) -> tuple:
    """Chart point as a flat real tuple, bit-exact field order:
    theta_2..theta_k as (a, b, c), Gamma_2..Gamma_k as (w, x, y, z),
    then A_1, B_1 .. A_g, B_g as (w, x, y, z) each."""
    out: list = []
    for t in p.thetas:
        out.extend(t)
    for g in p.gammas:
        out.extend(g)
    for a, b in p.handles:
        out.extend(a)
        out.extend(b)
    return tuple(out)


def unflatten_point(chart: ModuliChart, values) -> ChartPoint:
    values = list(values)
    n = chart.k - 1
    want = 3 * n + 4 * n + 8 * chart.genus
    if len(values) != want:
        raise ValueError("expected %d reals, got %d" % (want, len(values)))
    pos = 0
    thetas = []
    for _ in range(n):
        thetas.append(AlgVector(*values[pos:pos + 3]))
        pos += 3
    gammas = []
    for _ in range(n):
        gammas.append(UnitQuaternion(*values[pos:pos + 4]))
        pos += 4
    handles = []
    for _ in range(chart.genus):
        a = UnitQuaternion(*values[pos:pos + 4])
        b = UnitQuaternion(*values[pos + 4:pos + 8])
        handles.append((a, b))
        pos += 8
    return ChartPoint(chart, tuple(thetas), tuple(gammas), tuple(handles))


# --- the cotangent space of the group ------------------------------------------------


def cotangent_moment(g: UnitQuaternion, eta: AlgVector) -> tuple:
    """Moments of the translation lifts on T*SU(2), left-trivialized as
    pairs (g, eta): the left action h.(g, eta) = (hg, eta) has moment
    Ad_g eta, the right action (g, eta).h = (gh, Ad_{h^-1} eta) has
    moment -eta."""
    return (adjoint(g, eta), su2.vec_neg(eta))


def infinitesimal_translation(g: UnitQuaternion, xi: AlgVector,
                              step: float = FD_STEP) -> AlgVector:
    """The left-translation vector field at g, read in the left
    trivialization by finite differences: log(g^-1 exp(t xi) g) / t."""
    moved = mul(inv(g), mul(exp_su2(su2.vec_scale(xi, step)), g))
    return su2.vec_scale(log_su2(moved), 1.0 / step)


# --- word evaluation --------------------------------------------------------------


def eval_generator(p: ChartPoint, kind: str, ref) -> UnitQuaternion:
    if kind == "a":
        return p.handles[ref - 1][0]
    if kind == "b":
        return p.handles[ref - 1][1]
    pos = p.chart.index_of(ref)
    if kind == "g":
        return ONE if pos == 0 else p.gammas[pos - 1]
    if kind == "d":
        if pos == 0:
            return exp_su2(theta1_of(p))
        return boundary_loop(p, pos)
    raise ValueError("unknown generator kind %r" % kind)


def eval_word(p: ChartPoint, word: Word) -> UnitQuaternion:
    out = ONE
    for kind, ref, sign in word.gens:
        q = eval_generator(p, kind, ref)
        out = mul(out, q if sign > 0 else inv(q))
    return out


def word_residual(p: ChartPoint, word: Word) -> float:
    return su2.quat_dist(eval_word(p, word), ONE)


# --- tangent computations ----------------------------------------------------------


def perturb(p: ChartPoint, coord: int, h: float) -> ChartPoint:
    """Shift one ambient coordinate: additive on theta components,
    left-translation by exp(h e_i) on quaternion generators."""
    k1 = p.chart.k - 1
    if coord < 3 * k1:
        i, c = divmod(coord, 3)
        t = list(p.thetas[i])
        t[c] += h
        thetas = p.thetas[:i] + (AlgVector(*t),) + p.thetas[i + 1:]
        return ChartPoint(p.chart, thetas, p.gammas, p.handles)
    coord -= 3 * k1
    if coord < 3 * k1:
        i, c = divmod(coord, 3)
        step = exp_su2(AlgVector(*[h if j == c else 0.0 for j in range(3)]))
        gammas = p.gammas[:i] + (mul(step, p.gammas[i]),) + p.gammas[i + 1:]
        return ChartPoint(p.chart, p.thetas, gammas, p.handles)
    coord -= 3 * k1
    j, rest = divmod(coord, 6)
    which, c = divmod(rest, 3)
    step = exp_su2(AlgVector(*[h if i == c else 0.0 for i in range(3)]))
    a, b = p.handles[j]
    pair = (mul(step, a), b) if which == 0 else (a, mul(step, b))
    handles = p.handles[:j] + (pair,) + p.handles[j + 1:]
    return ChartPoint(p.chart, p.thetas, p.gammas, handles)


def constraint_map(p: ChartPoint, words) -> np.ndarray:
    out = []
    for w in words:
        val = eval_word(p, w)
        out.extend(log_su2(val))
    return np.array(out)


def constraint_jacobian(p: ChartPoint, words, step: float = FD_STEP) -> np.ndarray:
    d = p.chart.dim
    cols = []
    for coord in range(d):
        fp = constraint_map(perturb(p, coord, step), words)
        fm = constraint_map(perturb(p, coord, -step), words)
        cols.append((fp - fm) / (2.0 * step))
    return np.stack(cols, axis=1) if cols else np.zeros((3 * len(words), 0))


@dataclass(frozen=True)
class TangentFrame:
    vectors: tuple  # orthonormal kernel basis, rows of length chart.dim
    rank: int


def locus_tangent(p: ChartPoint, words, step: float = FD_STEP,
                  rtol: float = SVD_RTOL, tol: float = 1e-9) -> TangentFrame:
    """Kernel of the constraint differential at an on-locus point via
    SVD rank with threshold rtol * sigma_max."""
    d = p.chart.dim
    if not words:
        basis = tuple(tuple(1.0 if i == j else 0.0 for j in range(d)) for i in range(d))
        return TangentFrame(basis, 0)
    res = float(np.max(np.abs(constraint_map(p, words)))) if words else 0.0
    if res > tol:
        raise ConstraintViolated("constraint residual %g at the sample" % res)
    jac = constraint_jacobian(p, words, step)
    u, s, vt = np.linalg.svd(jac)
    cut = rtol * (s[0] if len(s) else 1.0)
    rank = int(np.sum(s > cut))
    kernel = vt[rank:]
    return TangentFrame(tuple(map(tuple, kernel)), rank)


def relation_kernel_dim(p: ChartPoint, step: float = FD_STEP,
                        rtol: float = SVD_RTOL) -> tuple:
    """Treat theta_1 as a free coordinate and cut the full relation
    e^{theta_1} c_2 ... [A,B].. = 1; the kernel of its differential is
    the tangent space of the chart, of dimension 6g + 6k - 6.

    Returns (kernel dimension, rank of the relation differential)."""
    d = p.chart.dim
    t1 = theta1_of(p)

    def rel(t1v, pt):
        return np.array(log_su2(mul(exp_su2(t1v), chart_defect(pt))))

    cols = []
    for c in range(3):
        hp = list(t1)
        hm = list(t1)
        hp[c] += step
        hm[c] -= step
        cols.append((rel(AlgVector(*hp), p) - rel(AlgVector(*hm), p)) / (2 * step))
    for coord in range(d):
        fp = rel(t1, perturb(p, coord, step))
        fm = rel(t1, perturb(p, coord, -step))
        cols.append((fp - fm) / (2 * step))
    jac = np.stack(cols, axis=1)
    s = np.linalg.svd(jac, compute_uv=False)
    rank = int(np.sum(s > rtol * s[0]))
    return (jac.shape[1] - rank, rank)


# --- sampling on loci ----------------------------------------------------------------


def sample_on_locus(chart: ModuliChart, words, seed: int,
                    zero_thetas: bool = False, restarts: int = 10) -> ChartPoint:
    """Point satisfying Hol_w = 1 for every word.

    Single-generator words are solved exactly by pinning the generator;
    anything else falls back to seeded Gauss-Newton refinement down to
    residual 1e-10."""
    pinned_handles = {}
    pinned_thetas = set()
    hard = []
    for w in words:
        single = w.single_generator()
        if single and single[0] in ("a", "b"):
            pinned_handles[(single[1] - 1, 0 if single[0] == "a" else 1)] = ONE
        elif single and single[0] == "d" and chart.index_of(single[1]) > 0:
            pinned_thetas.add(chart.index_of(single[1]) - 1)
        else:
            hard.append(w)
    for attempt in range(restarts):
        p = random_point(chart, mix_seed(seed, 101, attempt), zero_thetas=zero_thetas)
        thetas = tuple(
            AlgVector(0.0, 0.0, 0.0) if i in pinned_thetas else t
            for i, t in enumerate(p.thetas)
        )
        handles = tuple(
            (
                pinned_handles.get((j, 0), a),
                pinned_handles.get((j, 1), b),
            )
            for j, (a, b) in enumerate(p.handles)
        )
        p = ChartPoint(chart, thetas, p.gammas, handles)
        if not is_admissible(p, ADMISSIBLE_MARGIN):
            continue
        if hard:
            p = _newton_refine(p, words, pinned_thetas, pinned_handles)
            if p is None:
                continue
        residual = float(np.max(np.abs(constraint_map(p, words)))) if words else 0.0
        if residual <= 1e-10 and is_admissible(p, ADMISSIBLE_MARGIN):
            return p
    raise SamplingFailed("no on-locus sample after %d restarts" % restarts)


def _newton_refine(p, words, pinned_thetas, pinned_handles, iters: int = 60):
    for _ in range(iters):
        f = constraint_map(p, words)
        if float(np.max(np.abs(f))) <= 1e-12:
            return p
        jac = constraint_jacobian(p, words)
        dx, *_ = np.linalg.lstsq(jac, -f, rcond=None)
        if not np.all(np.isfinite(dx)):
            return None
        scale = 1.0
        nrm = float(np.linalg.norm(dx))
        if nrm > 0.5:
            scale = 0.5 / nrm
        for coord, delta in enumerate(dx):
            if delta != 0.0:
                p = perturb(p, coord, float(delta) * scale)
        thetas = []
        for i, t in enumerate(p.thetas):
            if i in pinned_thetas:
                thetas.append(AlgVector(0.0, 0.0, 0.0))
            elif t.norm() >= math.pi - 1e-6:
                thetas.append(su2.vec_scale(t, (math.pi - 1e-3) / t.norm()))
            else:
                thetas.append(t)
        handles = tuple(
            (pinned_handles.get((j, 0), a), pinned_handles.get((j, 1), b))
            for j, (a, b) in enumerate(p.handles)
        )
        p = ChartPoint(p.chart, tuple(thetas), p.gammas, handles)
    f = constraint_map(p, words)
    return p if float(np.max(np.abs(f))) <= 1e-10 else None


# --- gauge comparison -----------------------------------------------------------------


def _rotation_between(v: AlgVector, u: AlgVector) -> UnitQuaternion:
    """Minimal rotation sending direction v to direction u."""
    nv, nu = v.norm(), u.norm()
    if nv < 1e-12 or nu < 1e-12:
        return ONE
    a = AlgVector(v.a / nv, v.b / nv, v.c / nv)
    b = AlgVector(u.a / nu, u.b / nu, u.c / nu)
    cross = AlgVector(
        a.b * b.c - a.c * b.b, a.c * b.a - a.a * b.c, a.a * b.b - a.b * b.a
    )
    dot = a.a * b.a + a.b * b.b + a.c * b.c
    s = cross.norm()
    if s < 1e-12:
        if dot > 0:
            return ONE
        # antiparallel: turn by pi around any orthogonal axis
        axis = AlgVector(1.0, 0.0, 0.0) if abs(a.a) < 0.9 else AlgVector(0.0, 1.0, 0.0)
        ortho = AlgVector(
            a.b * axis.c - a.c * axis.b,
            a.c * axis.a - a.a * axis.c,
            a.a * axis.b - a.b * axis.a,
        )
        n = ortho.norm()
        return exp_su2(AlgVector(ortho.a / n * math.pi / 2, ortho.b / n * math.pi / 2,
                                 ortho.c / n * math.pi / 2))
    angle = math.atan2(s, dot)
    return exp_su2(AlgVector(cross.a / s * angle / 2, cross.b / s * angle / 2,
                             cross.c / s * angle / 2))


def _vec(q: UnitQuaternion) -> AlgVector:
    return AlgVector(q.x, q.y, q.z)


def canonical_gauge(p: ChartPoint):
    """Deterministic gauge fixing: every arc holonomy is set to 1 (the
    factor at boundary i is forced to g_1 Gamma_i), then the residual
    diagonal rotation is pinned by sending the first usable frame
    vector (handle logs first, boundary values after) to the x-axis and
    the next independent one into the upper xy-plane.

    Returns (gauge tuple, canonical point)."""
    k = p.chart.k
    fix = (ONE,) + tuple(p.gammas)
    q = action(fix, p)
    frame = []
    for a, b in q.handles:
        frame.append(_vec(a))
        frame.append(_vec(b))
    frame.extend(q.thetas)
    v1 = next((v for v in frame if v.norm() > 1e-8), None)
    if v1 is None:
        return fix, q
    r1 = _rotation_between(v1, AlgVector(v1.norm(), 0.0, 0.0))
    axis = AlgVector(1.0, 0.0, 0.0)
    twist = ONE
    for v in frame:
        w = adjoint(r1, v)
        planar = math.hypot(w.b, w.c)
        if planar > 1e-8:
            ang = math.atan2(w.c, w.b)
            twist = exp_su2(AlgVector(-ang / 2, 0.0, 0.0))
            break
    r = mul(twist, r1)
    gs = tuple(mul(r, f) for f in fix)
    return gs, action((r,) * k, q)


def solve_gauge(p: ChartPoint, q: ChartPoint):
    """Gauge tuple g with action(g, p) = q when the points are gauge
    equivalent, found by comparing canonical forms.

    Returns (gs, residual)."""
    if p.chart != q.chart:
        raise ValueError("points live in different charts")
    gp, cp = canonical_gauge(p)
    gq, cq = canonical_gauge(q)
    gs = tuple(mul(inv(a), b) for a, b in zip(gq, gp))
    return gs, point_distance(cp, cq)


def point_distance(p: ChartPoint, q: ChartPoint) -> float:
    out = 0.0
    for t1, t2 in zip(p.thetas, q.thetas):
        out = max(out, su2.vec_dist(t1, t2))
    for g1, g2 in zip(p.gammas, q.gammas):
        out = max(out, su2.quat_dist(g1, g2))
    for (a1, b1), (a2, b2) in zip(p.handles, q.handles):
        out = max(out, su2.quat_dist(a1, a2), su2.quat_dist(b1, b2))
    return out


def gauge_equivalent(p: ChartPoint, q: ChartPoint, tol: float = 1e-9):
    """(equal mod gauge, residual, gauge tuple)."""
    gs, r = solve_gauge(p, q)
    return (r < tol, r, gs)
