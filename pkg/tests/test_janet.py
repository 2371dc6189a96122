"""Jet machinery: compatibility conditions, membership, projections,
Spencer symbols and the first-order reduction."""

import pytest

from fractions import Fraction

from dualops.field import FieldContext, jet_dim
from dualops.ore import BoundExceeded, OpMatrix, OreOperator, adjoint_matrix
from dualops.janet import (
    JetMatrix,
    cc,
    delta_cohomology_dims,
    delta_map,
    membership,
    pp_reduce,
    spencerize,
    symbol_dims,
    symbol_of,
)
from dualops import geom


def _d(ctx, *ix):
    return OreOperator.d(ctx, *ix)


# -- compatibility conditions ------------------------------------------


def test_cc_composes_to_zero_across_fixtures():
    for A in (
        geom.airy(),
        geom.macaulay_system(),
        geom.two_jets_system(),
        geom.killing(2),
        geom.gradient_triple()[1],
    ):
        res = cc(A, 4)
        if res.cc is None:
            continue
        assert (res.cc * A).is_zero()


def test_cc_full_row_rank_is_certified_empty():
    for A in (geom.cauchy(2), geom.cauchy(3), geom.div3()):
        res = cc(A, 3)
        assert res.cc is None
        assert res.certified_complete
        assert res.search_order == 0


def test_cc_airy_left_kernel():
    res = cc(geom.airy(), 3)
    assert res.cc is not None
    assert res.cc.p == 2
    assert res.certified_complete
    assert (res.cc * geom.airy()).is_zero()


def test_cc_two_jets_unique_second_order():
    res = cc(geom.two_jets_system(), 4)
    assert res.cc is not None and res.cc.p == 1
    assert res.cc.order == 2
    assert res.certified_complete
    C = geom.two_jets_single()
    assert membership(list(res.cc.rows[0]), C, 2) is not None
    assert membership(list(C.rows[0]), res.cc, 2) is not None


def test_cc_killing2_is_plane_strain_compatibility():
    # single CC row: d_22 e_11 - d_12 e_12 + d_11 e_22 up to scaling
    res = cc(geom.killing(2), 3)
    assert res.cc is not None and res.cc.p == 1
    assert res.cc.order == 2
    assert (res.cc * geom.killing(2)).is_zero()


def test_cc_gradient_triple_row():
    ctx, G = geom.gradient_triple()
    res = cc(G, 4)
    assert res.cc is not None and res.cc.p == 1
    assert res.certified_complete
    row = list(res.cc.rows[0])
    d1, d2 = _d(ctx, 1), _d(ctx, 2)
    z = OreOperator.zero(ctx)
    expected = [d1, z, -1 * d2]
    scaled = [-1 * e for e in expected]
    assert row == expected or row == scaled


def test_cc_minimize_prunes_nothing_on_minimal_sets():
    res = cc(geom.two_jets_system(), 4, minimize=True)
    assert res.cc is not None and res.cc.p == 1


def test_cc_ranks_are_additive_when_certified():
    A = geom.macaulay_system()
    res = cc(A, 4)
    assert res.certified_complete
    assert res.rank_input + res.rank_cc == A.p


# -- membership --------------------------------------------------------


def test_membership_two_jets_identities():
    ctx = geom.two_jets_pair().ctx
    pair = geom.two_jets_pair()
    single = geom.two_jets_single()
    got = membership(list(pair.rows[0]), single, 2)
    assert got is not None
    # reconstruct and compare exactly
    lhs = OpMatrix(ctx, [[got[0]]]) * single
    assert lhs == OpMatrix(ctx, [pair.rows[0]])


def test_membership_negative_certificate():
    ctx, G = geom.gradient_pair(0)
    ad = adjoint_matrix(G)
    one = OreOperator.from_scalar(ctx.one)
    assert membership([one], ad, 3) is None


def test_membership_positive_lift():
    ctx, G = geom.gradient_pair(1)
    ad = adjoint_matrix(G)
    one = OreOperator.from_scalar(ctx.one)
    lift = membership([one], ad, 2)
    assert lift is not None
    total = OreOperator.zero(ctx)
    for U, g in zip(lift, [r[0] for r in ad.rows]):
        total = total + U * g
    assert total == one


def test_membership_dimension_error():
    single = geom.two_jets_single()
    with pytest.raises(Exception):
        membership([OreOperator.zero(single.ctx)], single, 1)


# -- prolongation / projection -----------------------------------------


def test_pp_chain_two_jets():
    assert pp_reduce(geom.two_jets_system(), 0, 4) == [6, 4, 3, 2, 1, 0]


def test_pp_chain_stabilizes_for_macaulay():
    dims = pp_reduce(geom.macaulay_system(), 1, 2)
    # ambient J_3 = 20; the system already cuts out its solution space
    assert dims[0] == 20
    assert dims[1] == dims[2] == dims[3] == 8


def test_jet_matrix_rank_macaulay_solution_dim():
    M = geom.macaulay_system()
    jm = JetMatrix(M, 1)
    assert jet_dim(3, 3) - jm.rank() == 8


# -- symbols and delta cohomology --------------------------------------


def test_symbol_dims_conformal3():
    assert symbol_dims(geom.conformal_killing(3), 2) == [4, 3, 0]


def test_symbol_chain_conformal_all_n():
    for n in (3, 4, 5, 6):
        g1 = symbol_of(geom.conformal_killing(n))
        g2 = g1.prolong()
        g3 = g2.prolong()
        assert g1.dim == n * (n - 1) // 2 + 1
        assert g2.dim == n
        assert g3.dim == 0


def test_symbol_chain_killing():
    for n in (2, 3, 4):
        g1 = symbol_of(geom.killing(n))
        assert g1.dim == n * (n - 1) // 2
        assert g1.prolong().dim == 0


def test_delta_cohomology_conformal_curvature_dims():
    expected = {3: 0, 4: 10, 5: 35, 6: 84}
    for n, want in expected.items():
        g1 = symbol_of(geom.conformal_killing(n))
        coh = delta_cohomology_dims(g1, 2)
        assert coh["dim"] == want
        assert want == n * (n + 1) * (n + 2) * (n - 3) // 12
    # the n = 4 split
    g1 = symbol_of(geom.conformal_killing(4))
    coh4 = delta_cohomology_dims(g1, 2)
    assert coh4["cocycles"] == 26
    assert coh4["coboundaries"] == 16


def test_delta_cohomology_killing_curvature_dims():
    for n in (4, 5, 6):
        g1 = symbol_of(geom.killing(n))
        coh = delta_cohomology_dims(g1, 2)
        assert coh["dim"] == n * n * (n * n - 1) // 12
        assert coh["coboundaries"] == 0


def test_delta_special_middle_fiber_n3():
    g2 = symbol_of(geom.conformal_killing(3)).prolong()
    dm = delta_map(g2, 2)
    assert dm.kernel_dim == 5


def test_delta_map_degenerate_degree():
    g1 = symbol_of(geom.killing(2))
    assert delta_map(g1, -1).domain_dim == 0


# -- spencerize --------------------------------------------------------


def test_spencerize_macaulay_closes():
    sp = spencerize(geom.macaulay_system(), 4)
    assert sp.closed
    assert len(sp.unknowns) == 8
    assert sp.matrix.order == 1


def test_spencerize_flat_third_order_chain():
    ctx = FieldContext.std(1)
    sp = spencerize(geom.third_order_flat(), 4)
    d = _d(ctx, 1)
    z = OreOperator.zero(ctx)
    m1 = OreOperator.from_scalar(ctx.num(-1))
    want = OpMatrix(ctx, [[d, m1, z], [z, d, m1], [z, z, d]])
    assert sp.matrix == want
    assert sp.closed


def test_spencerize_pendulum_dims_repeat_path():
    ctx, P = geom.double_pendulum()
    sp = spencerize(P, 6)
    assert not sp.closed
    assert (sp.matrix.p, sp.matrix.m) == (6, 7)
    assert sp.matrix.order == 1


def test_spencerize_bound_exceeded():
    ctx, P = geom.double_pendulum()
    with pytest.raises(BoundExceeded):
        spencerize(P, 0)
