import pytest

from cobord2 import catalog as cat
from cobord2 import cobordism as cb
from cobord2 import functor as fn
from cobord2.cobordism import Circle, Move, SurfComponent, Surface, cylinder_seq
from cobord2.diagram import Face, Wire
from cobord2.symcat import HamInstance, equal_2morphisms, normalize_mod_equiv, try_compose1_sym
from cobord2.words import Word


def test_eval0_orientations():
    circles = (Circle("a"), Circle("b", -1))
    g = fn.eval0(circles)
    assert ("a", 1) in g.circles and ("b", -1) in g.circles
    assert fn.eval0(()) .circles == ()


def test_eval1_reads_genus_and_boundaries():
    pants = Surface(
        (SurfComponent(0, (Circle("c0"),), (Circle("c1"), Circle("c2"))),),
        (Circle("c0"),),
        (Circle("c1"), Circle("c2")),
    )
    seq = fn.eval1((pants,))
    sym = seq.items[0]
    assert sym.components[0].genus == 0
    assert sym.components[0].k == 3
    disc = Surface((SurfComponent(0, (), (Circle("c"),)),), (), (Circle("c"),))
    sym2 = fn.eval1((disc,)).items[0]
    assert sym2.components[0].k == 1


def test_eval1_ignores_parametrization_ids():
    # reparametrizing an intermediate circle changes the decorated
    # chain but not its evaluation
    def chain(param):
        mid = Circle("mid", 1, param)
        a = Surface((SurfComponent(0, (Circle("c0"),), (mid,)),), (Circle("c0"),), (mid,))
        b = Surface((SurfComponent(1, (mid,), (Circle("c1"),)),), (mid,), (Circle("c1"),))
        return (a, b)

    one, two = chain("p"), chain("q")
    assert one != two
    assert fn.eval1(one) == fn.eval1(two)


def test_closed_surface_stays_length_two():
    chain = cb.closed_surface_chain(2)
    seq = fn.eval1(chain)
    assert len(seq.items) == 2
    assert try_compose1_sym(seq.items[0], seq.items[1]) is None


def test_eval2_cylinder_normalizes_empty():
    inst = HamInstance()
    d = fn.eval2(cylinder_seq(cat._annulus_chain()), inst)
    assert normalize_mod_equiv(d, inst).rows == ()


def test_eval2_functorial_under_concatenation():
    inst = HamInstance()
    seq = cat._compression_tower()
    d_all = fn.eval2(seq, inst)
    d1 = fn.eval2(seq[:1], inst)
    d2 = fn.eval2(seq[1:], inst)
    assert d_all.rows == d1.rows + d2.rows


def test_cancelling_pair_normalizes_to_identity():
    inst = HamInstance()
    pair = cb.apply_move(cylinder_seq(cat._annulus_chain(0)), Move("create12", 0, (0, 0)))
    d = fn.eval2(pair, inst)
    # the two faces merge to the diagonal, which is the identity
    f1 = d.rows[0][0].morph
    f2 = d.rows[1][0].morph
    merged = inst.try_compose2_vertical(f1, f2)
    assert merged is not None and merged.kind == "diagonal"
    assert normalize_mod_equiv(d, inst).rows == ()


def test_zero_one_pattern_normalizes_empty():
    inst = HamInstance()
    trio = cb.apply_move(cylinder_seq(cat._capped_chain()), Move("create01", 0, (0, "ball")))
    d = fn.eval2(trio, inst)
    assert d.face_count() == 3
    assert normalize_mod_equiv(d, inst).rows == ()


def test_two_three_pattern_normalizes_empty():
    inst = HamInstance()
    trio = cb.apply_move(cylinder_seq(cat._capped_chain()), Move("create23", 0, (0, "ball")))
    d = fn.eval2(trio, inst)
    assert normalize_mod_equiv(d, inst).rows == ()


def test_imbrication_merges_words_symbolically():
    inst = HamInstance()
    tower = cat._compression_tower()
    d = fn.eval2(tower, inst)
    n = normalize_mod_equiv(d, inst)
    assert n.face_count() == 1
    face = [c for row in n.rows for c in row if isinstance(c, Face)][0]
    assert face.morph.kind == "hol_trivial"
    assert len(face.morph.words) == 2


def test_eval1_circle_refinement_gives_equivalent_sequences():
    from cobord2.symcat import equiv_seq_mod_excision
    from cobord2.diagram import EquivResult

    chain = cat._annulus_chain()
    double = cylinder_seq(chain) + cylinder_seq(chain)
    fine = cb.apply_move(double, Move("circle_insert", 1, (0, 1, "mid")))
    coarse_seq = fn.eval1(chain)
    fine_seq = fn.eval1(fine[0].target)
    assert len(fine_seq.items) == 2
    assert equiv_seq_mod_excision(fine_seq, coarse_seq, 3) is EquivResult.YES


def test_normalization_idempotent_over_corpus():
    inst = HamInstance()
    for name, y1, moves in cat.cerf_move_catalog():
        for seq in (y1, cb.apply_moves(y1, moves)):
            n = normalize_mod_equiv(fn.eval2(seq, inst), inst)
            again = normalize_mod_equiv(n, inst)
            assert again.rows == n.rows, name


def test_invariance_over_move_catalog():
    for name, y1, moves in cat.cerf_move_catalog():
        y2 = cb.apply_moves(y1, moves)
        records = fn.invariance_check(y1, y2, moves)
        failed = [r for r in records if not r[1]]
        assert not failed, (name, failed)


def test_invariance_negative_control():
    y1, y2 = cat.negative_control()
    records = fn.invariance_check(y1, y2, [])
    statuses = {name: ok for name, ok, _ in records}
    assert statuses["normal-forms-equal"] is False


def test_move_chain_invalid_detected():
    y1 = cylinder_seq(cat._annulus_chain(0))
    y2 = cb.apply_move(y1, Move("cyl_create", 0))
    with pytest.raises(cb.MoveChainInvalid):
        fn.invariance_check(y1, y2, [Move("create12", 0, (0, 0))])


def test_membership_diagonal_and_zero_section():
    from cobord2.symcat import CorrSymbol

    inst = HamInstance()
    disc = fn.eval_surface(
        Surface((SurfComponent(0, (), (Circle("c"),)),), (), (Circle("c"),))
    )
    face = CorrSymbol("zero_section", (), (disc, disc), circles=("c",))
    pts = [fn.component_points(disc, 5, zero_thetas=True)] * 2
    ok, r = fn.membership(face, [], pts)
    assert ok and r <= 1e-9

    ann = fn.eval_surface(cat._annulus_chain()[0])
    diag = CorrSymbol("diagonal", (ann,), (ann,))
    p = fn.component_points(ann, 11)
    ok, r = fn.membership(diag, [p], [p])
    assert ok


def test_membership_hol_trivial_projection():
    inst = HamInstance()
    pair = cb.apply_move(cylinder_seq(cat._annulus_chain(0)), Move("create12", 0, (0, 0)))
    d = fn.eval2(pair, inst)
    down = d.rows[1][0].morph   # the index-2 face, big side on top
    samples = fn.sample_face_points(down, 17, 5)
    assert samples
    for src_pts, tgt_pts in samples:
        ok, r = fn.membership(down, src_pts, tgt_pts)
        assert ok, r


def test_membership_identification_via_glue():
    inst = HamInstance()
    chain = cat._annulus_chain()
    double = cylinder_seq(chain) + cylinder_seq(chain)
    fine = cb.apply_move(double, Move("circle_insert", 1, (0, 1, "mid")))
    d = fn.eval2(fine, inst)
    # second row holds the identification face
    ident = [c for c in d.rows[1] if isinstance(c, Face)][0].morph
    assert ident.kind == "identification"
    import cobord2.charts as ch
    from cobord2 import su2

    sym_a, sym_b = ident.src
    got = 0
    for trial in range(20):
        pa = fn.component_points(sym_a, su2.mix_seed(23, trial))
        pb = fn.component_points(sym_b, su2.mix_seed(29, trial))
        # the glued circle is b's determined boundary; match from side a
        target = su2.vec_neg(ch.theta1_of(pb[0]))
        a_pt = pa[0]
        pos = a_pt.chart.index_of("mid")
        assert pos > 0
        thetas = list(a_pt.thetas)
        thetas[pos - 1] = target
        pa[0] = ch.ChartPoint(a_pt.chart, tuple(thetas), a_pt.gammas, a_pt.handles)
        try:
            pieces = fn._glue_symbol_points(pa, pb, ident.glued)
        except Exception:
            continue
        tgt_sym = ident.tgt[0]
        aligned = fn._permute_to_chart(pieces[0], fn.chart_for(tgt_sym.components[0]))
        if aligned is None:
            continue
        ok, r = fn.membership(ident, [pa, pb], [{0: aligned}])
        assert ok, r
        got += 1
    assert got >= 10
