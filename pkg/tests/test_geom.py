"""The operator zoo: frozen shapes, compositions and classical identities."""

from fractions import Fraction

import pytest

from dualops.field import FieldContext
from dualops.ore import DimensionMismatch, OpMatrix, OreOperator, adjoint_matrix
from dualops.janet import cc
from dualops.duality import five_step_test, weighted_adjoint
from dualops import geom

ctx2 = FieldContext.std(2)
ctx3 = FieldContext.std(3)


def _d(ctx, *ix):
    return OreOperator.d(ctx, *ix)


def _z(ctx):
    return OreOperator.zero(ctx)


# -- metric bookkeeping ------------------------------------------------


def test_metric_constructors():
    e = geom.Metric.euclidean(3)
    assert e.diag == (1, 1, 1)
    m = geom.Metric.minkowski(4)
    assert m.diag == (1, 1, 1, -1)
    with pytest.raises(ValueError):
        geom.Metric((1, 0))


def test_sym2_enumeration():
    assert geom.sym2_indices(2) == [(0, 0), (0, 1), (1, 1)]
    assert geom.sym2_weights(3) == [1, 2, 2, 1, 2, 1]
    assert len(geom.sym2_indices(4)) == 10


# -- first order geometry ----------------------------------------------


def test_killing_shapes():
    for n, p in ((2, 3), (3, 6), (4, 10)):
        K = geom.killing(n)
        assert (K.p, K.m) == (p, n)
        assert K.order == 1


def test_conformal_killing_rank_deficit():
    # the trace-removed rows carry one order-zero relation
    for n in (3, 4):
        CK = geom.conformal_killing(n)
        assert CK.p == n * (n + 1) // 2
        res = cc(CK, 3)
        assert res.cc is not None
        orders = sorted(int(r_order) for r_order in
                        [max(op.order for op in row if not op.is_zero())
                         for row in res.cc.rows])
        assert orders[0] == 0


def test_conformal3_cc_order_histogram():
    res = cc(geom.conformal_killing(3), 3)
    hist = {}
    for row in res.cc.rows:
        o = int(max(op.order for op in row if not op.is_zero()))
        hist[o] = hist.get(o, 0) + 1
    assert hist == {0: 1, 3: 5}


# -- elasticity chain ---------------------------------------------------


def test_cauchy_is_divergence():
    C3 = geom.cauchy(3)
    d = lambda *ix: _d(ctx3, *ix)
    z = _z(ctx3)
    want = OpMatrix(ctx3, [
        [d(1), d(2), d(3), z, z, z],
        [z, d(1), z, d(2), d(3), z],
        [z, z, d(1), z, d(2), d(3)],
    ])
    assert C3 == want
    assert (geom.cauchy(2).p, geom.cauchy(2).m) == (2, 3)


def test_cauchy_airy_composition():
    assert (geom.cauchy(2) * geom.airy()).is_zero()


def test_cauchy_beltrami_composition():
    assert (geom.cauchy(3) * geom.beltrami()).is_zero()


def test_maxwell_morera_are_beltrami_columns():
    B = geom.beltrami()
    MX = geom.maxwell_potentials()
    MO = geom.morera_potentials()
    for k, c in enumerate((0, 3, 5)):
        for i in range(6):
            assert MX.rows[i][k] == B.rows[i][c]
    for k, c in enumerate((1, 2, 4)):
        for i in range(6):
            assert MO.rows[i][k] == B.rows[i][c]
    assert (geom.cauchy(3) * MX).is_zero()
    assert (geom.cauchy(3) * MO).is_zero()


def test_airy_is_adjoint_of_plane_curvature():
    R2 = geom.riemann_lin(2)
    assert (R2.p, R2.m) == (1, 3)
    W3 = [Fraction(w) for w in geom.sym2_weights(2)]
    assert weighted_adjoint(R2, [Fraction(1)], W3) == geom.airy()


def test_riemann3_relations():
    R3 = geom.riemann_lin(3)
    assert (R3.p, R3.m) == (6, 6)
    res = cc(R3, 2)
    assert res.cc is not None and res.cc.p == 3
    assert res.cc.order == 1
    assert res.certified_complete


def test_riemann_count_n4():
    R4 = geom.riemann_lin(4)
    assert R4.p == 20
    assert R4.m == 10


# -- trace adjustments --------------------------------------------------


def test_einstein_identity_all_n():
    """einstein == ricci - (1/2) omega tr(ricci) entrywise."""
    for n in (2, 3, 4):
        met = geom.Metric.euclidean(n)
        E = geom.einstein_lin(met)
        R = geom.ricci_lin(met)
        tr = geom.ricci_trace(met)
        pairs = geom.sym2_indices(n)
        half = Fraction(1, 2)
        for s, (i, j) in enumerate(pairs):
            for c in range(E.m):
                want = R.rows[s][c]
                if i == j:
                    want = want - met.omega(i) * half * tr[c]
                assert E.rows[s][c] == want


def test_einstein2_vanishes():
    assert geom.einstein_lin(2).is_zero()


def test_einstein3_is_doubled_beltrami():
    W6 = [Fraction(-w) for w in geom.sym2_weights(3)]
    assert geom.einstein_lin(3) == geom.beltrami().scale_rows(W6)


def test_divergence_of_einstein_vanishes():
    # the raised divergence with pair weights, not the plain equilibrium rows
    for met in (geom.Metric.euclidean(3), geom.Metric.minkowski(4)):
        E = geom.einstein_lin(met)
        assert (geom.div_op(met) * E).is_zero()


def test_ricci_adjoint_formula_minkowski():
    met = geom.Metric.minkowski(4)
    R4 = geom.ricci_lin(met)
    W10 = [Fraction(w) for w in geom.sym2_weights(4)]
    ones = [Fraction(1)] * 10
    AW = weighted_adjoint(R4, ones, W10)
    F = geom.ricci_adjoint_formula(met)
    assert AW == F
    assert (geom.cauchy(4) * F).is_zero()


# -- control fixtures ---------------------------------------------------


def test_kalman_builder_shapes():
    A = [[0, 1], [0, 0]]
    B = [[0], [1]]
    M = geom.kalman(A, B)
    assert (M.p, M.m) == (2, 3)
    assert geom.controllability_rank(A, B) == 2
    assert geom.controllability_rank([[1, 0], [0, 2]], [[1], [0]]) == 1


def test_kalman_dimension_errors():
    with pytest.raises(DimensionMismatch):
        geom.kalman([[0, 1]], [[1]])
    with pytest.raises(DimensionMismatch):
        geom.kalman([[0]], [[1], [2]])


def test_double_pendulum_rows():
    ctx, P = geom.double_pendulum()
    g = ctx.var("g")
    l1, l2 = ctx.var("l1"), ctx.var("l2")
    d2 = _d(ctx, 1, 1)
    sc = OreOperator.from_scalar
    want = OpMatrix(ctx, [
        [d2, sc(l1) * d2 + sc(g), _z(ctx)],
        [d2, _z(ctx), sc(l2) * d2 + sc(g)],
    ])
    assert P == want


def test_mixed_pair_adjoint_rows():
    ctx, D = geom.mixed_pair()
    a = ctx.var("a")
    d = _d(ctx, 1)
    sc = OreOperator.from_scalar
    want = OpMatrix(ctx, [
        [-1 * d, sc(ctx.one)],
        [-1 * sc(a), d],
        [d, -1 * d],
    ])
    assert adjoint_matrix(D) == want


# -- cosserat fixtures --------------------------------------------------


def test_cosserat_identities():
    CM = geom.cosserat_motion()
    CCC = geom.cosserat_cc()
    POT = geom.cosserat_potentials()
    assert (CCC * CM).is_zero()
    assert (adjoint_matrix(CM) * POT).is_zero()


# -- dimension formulas -------------------------------------------------


def test_killing_resolution_fibers():
    assert geom.killing_resolution_fibers(3) == (3, 6, 6, 3)


def test_conformal_curvature_dim_formula():
    # n = 3 records the third-order count, the formula holds from n = 4
    assert geom.conformal_curvature_dim(3) == 5
    for n in (4, 5, 6):
        assert geom.conformal_curvature_dim(n) == n * (n + 1) * (n + 2) * (n - 3) // 12


# -- registry -----------------------------------------------------------


def test_registry_is_complete_and_buildable():
    names = geom.demo_names()
    assert len(names) == len(set(names))
    for want in (
        "airy", "beltrami", "cauchy2", "cauchy3", "macaulay", "state_space",
        "two_jets_pair", "two_jets_single", "two_jets_source",
    ):
        assert want in names
    for name in names:
        fx = geom.demo(name)
        assert fx.name == name
        assert fx.matrix.p >= 1
        assert fx.description


def test_registry_unknown_name():
    with pytest.raises(KeyError):
        geom.demo("no_such_fixture")
