import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from qgc.curvature import (SPEED_SQ_PREFACTOR, curvature_formula, curvature_koszul,
                           curvature_tensor, figure2_sweep, sectional, tradewind_limit,
                           tradewind_plane, tradewind_sectional, tradewind_theta, unit_pair,
                           zonal_plane, zonal_sectional)
from qgc.errors import DegeneratePlaneError, DomainError
from qgc.extension import HatVector, MetricContext, basis_vectors, metric
from qgc.harmonics import ModeIndex
from qgc.structure import build_table

seeds = st.integers(0, 2**31)


def rand(seed, n=4, lmax=3):
    rng = np.random.default_rng(seed)
    return [HatVector.random_real(lmax, rng) for _ in range(n)]


@given(seeds, st.sampled_from([0.0, 0.7, 1.0]))
def test_formula_equals_koszul(seed, alpha):
    table = build_table(3)
    ctx = MetricContext(alpha)
    x, y, z, w = rand(seed)
    assert abs(curvature_formula(x, y, z, w, ctx, table)
               - curvature_koszul(x, y, z, w, ctx, table)) < 1e-10


@given(seeds)
def test_curvature_symmetries(seed):
    table = build_table(2)
    ctx = MetricContext(0.5)
    x, y, z, w = rand(seed, lmax=2)

    def R(a, b, c, d):
        return curvature_koszul(a, b, c, d, ctx, table)

    r = R(x, y, z, w)
    assert abs(r + R(y, x, z, w)) < 1e-10
    assert abs(r + R(x, y, w, z)) < 1e-10
    assert abs(r - R(z, w, x, y)) < 1e-10
    assert abs(r + R(y, z, x, w) + R(z, x, y, w)) < 1e-10


def test_tensor_matches_direct_calls(table3):
    vecs = basis_vectors(2, (0.0, 1.0))
    ctx = MetricContext(0.7)
    rf = curvature_tensor(vecs, ctx, table3, "formula")
    rk = curvature_tensor(vecs, ctx, table3, "koszul")
    rng = np.random.default_rng(4)
    for i, j, k, l in rng.integers(0, len(vecs), (25, 4)):
        assert abs(rk[i, j, k, l] - curvature_koszul(vecs[i], vecs[j], vecs[k], vecs[l],
                                                     ctx, table3)) < 1e-12
        assert abs(rf[i, j, k, l] - curvature_formula(vecs[i], vecs[j], vecs[k], vecs[l],
                                                      ctx, table3)) < 1e-12
    with pytest.raises(DomainError):
        curvature_tensor(vecs, ctx, table3, "spline")


@pytest.mark.parametrize("alpha", [0.0, 0.7])
def test_sign_convention_invariance(alpha, table3):
    vecs = basis_vectors(2, (0.0, 1.0))
    ctx = MetricContext(alpha)
    r = curvature_tensor(vecs, ctx, table3)
    rf = curvature_tensor(vecs, ctx, table3.flipped())
    assert_allclose(rf, r, atol=1e-12)


def test_zonal_example():
    assert_allclose(zonal_sectional(1, 0, 0, 1, 1), 3 / (32 * math.pi), atol=1e-15)
    assert_allclose(3 / (32 * math.pi), 0.0298416, atol=1e-7)
    assert zonal_sectional(1, 0, 0, 3, 0) == 0.0


@pytest.mark.parametrize("l0", range(1, 7))
def test_zonal_reduction(l0):
    table = build_table(6)
    ctx = MetricContext(0.0)
    for m0 in range(0, l0 + 1):
        ref = 3 / (8 * math.pi) * m0 ** 2 / (l0 ** 2 * (l0 + 1) ** 2)
        assert abs(zonal_sectional(1, 0, 0, l0, m0) - ref) < 1e-12
        xi, eta = zonal_plane(1, 0, l0, m0, ctx)
        if (l0, m0) == (1, 0):
            # eta is parallel to the rotation itself
            with pytest.raises(DegeneratePlaneError):
                sectional(xi, eta, ctx, table)
            continue
        assert abs(sectional(xi, eta, ctx, table).kappa - ref) < 1e-10


@given(st.floats(-3, 3).filter(lambda v: abs(v) > 0.05), st.floats(-5, 5),
       st.sampled_from([0.0, 0.6, 2.0]), st.integers(1, 4), st.data())
def test_zonal_closed_form_matches_general(nu, a, alpha, l0, data):
    m0 = data.draw(st.integers(-l0, l0))
    if (l0, m0) == (1, 0) and abs(a) < 1e-3:
        return
    table = build_table(4)
    ctx = MetricContext(alpha)
    xi, eta = zonal_plane(nu, a, l0, m0, ctx)
    k = sectional(xi, eta, ctx, table).kappa
    assert abs(k - zonal_sectional(nu, a, alpha, l0, m0)) < 1e-10 * max(1.0, abs(k))


def test_unit_pair_is_unit_and_real():
    for alpha in (0.0, 1.0):
        ctx = MetricContext(alpha)
        for l0, m0 in ((1, 1), (3, 2), (4, 0), (2, -1)):
            eta = unit_pair(l0, m0, ctx)
            assert eta.is_real()
            assert_allclose(metric(eta, eta, ctx), 1.0)


def test_sectional_guards(table3):
    ctx = MetricContext(0.0)
    x = HatVector.basis(2, 0)
    with pytest.raises(DegeneratePlaneError):
        sectional(x, 2.0 * x, ctx, table3)
    with pytest.raises(DomainError):
        sectional(HatVector.basis(2, 1), x, ctx, table3)
    with pytest.raises(DomainError):
        zonal_plane(1, 0, 2, 3, ctx)


@given(seeds, st.floats(0.2, 5), st.floats(-4, 4))
def test_sectional_plane_invariance(seed, s, c):
    # kappa depends only on the plane: rescaling and shearing leave it unchanged
    table = build_table(3)
    ctx = MetricContext(0.4)
    x, y = rand(seed, n=2)
    k = sectional(x, y, ctx, table).kappa
    assert_allclose(sectional(s * x, y, ctx, table).kappa, k, rtol=1e-9, atol=1e-12)
    assert_allclose(sectional(x + c * y, y, ctx, table).kappa, k, rtol=1e-8, atol=1e-12)
    assert_allclose(sectional(y, x, ctx, table).kappa, k, rtol=1e-9, atol=1e-12)


@pytest.mark.parametrize("args, expected", [
    ((0.0, 0.0, 2, 2), -0.170523153312745),
    ((12.0, 0.0, 2, 2), 0.0264101851495673),
    ((2.0, 1.0, 3, 2), None),
])
def test_tradewind_closed_form_matches_general(args, expected):
    a, alpha, l0, m0 = args
    ctx = MetricContext(alpha)
    xi, eta = tradewind_plane(a, l0, m0, ctx)
    k = sectional(xi, eta, ctx, build_table(max(l0, 2))).kappa
    assert_allclose(tradewind_sectional(a, alpha, l0, m0), k, rtol=1e-12, atol=1e-15)
    if expected is not None:
        assert_allclose(k, expected, rtol=1e-12)


def test_tradewind_all_small_planes():
    table = build_table(5)
    for a in (0.0, 2.0, 12.0):
        for alpha in (0.0, 1.0):
            ctx = MetricContext(alpha)
            for l0 in range(1, 6):
                for m0 in range(-l0, l0 + 1):
                    if m0 == 0:
                        continue
                    xi, eta = tradewind_plane(a, l0, m0, ctx)
                    k = sectional(xi, eta, ctx, table).kappa
                    assert abs(k - tradewind_sectional(a, alpha, l0, m0)) < 1e-12


def test_tradewind_large_l0_limit():
    for a in (0.0, 2.0, 12.0):
        for alpha in (0.0, 1.0):
            k = tradewind_sectional(a, alpha, 200, 200)
            assert abs(k / tradewind_limit(a, alpha) - 1) < 0.05
            assert abs(200 ** 2 * tradewind_theta(200, 200, alpha) / -4 - 1) < 0.05
    assert_allclose(tradewind_limit(0, 0), -15 / (8 * math.pi))
    assert_allclose(SPEED_SQ_PREFACTOR, 15 / (32 * math.pi))


def test_tradewind_monotone_in_a():
    # increasing a pushes negative tradewind curvatures up towards zero and beyond
    a_grid = np.arange(0, 12.5, 0.5)
    for l0 in range(2, 12):
        ks = [tradewind_sectional(a, 0.0, l0, l0) for a in a_grid]
        assert np.all(np.diff(ks) > 0)


def test_figure2_qualitative():
    rows = figure2_sweep([0.0, 12.0], range(1, 41))
    k12 = {l0: k for a, l0, k in rows if a == 12.0}
    k0 = {l0: k for a, l0, k in rows if a == 0.0}
    assert k12[2] > 0 and k12[3] > 0
    assert all(k12[l0] < 0 for l0 in range(8, 41))
    assert all(k0[l0] < 0 for l0 in range(2, 41))
    for a, l0, k in rows:
        assert k == tradewind_sectional(a, 0.0, l0, l0)


@pytest.mark.parametrize("alpha", [0.0, 1.0])
def test_tradewind_generator_versus_y20(alpha):
    # g = Y_20 / sqrt(6) + const: same plane curvature at alpha = 0,
    # and at alpha > 0 a ratio fixed by the norms alone
    table = build_table(4)
    ctx = MetricContext(alpha)
    y20 = HatVector({ModeIndex(2, 0): 1.0})
    for l0, m0 in ((2, 2), (3, 2), (3, 3), (4, 4)):
        xi, eta = tradewind_plane(0.0, l0, m0, ctx)
        kg = sectional(xi, eta, ctx, table).kappa
        ky = sectional(y20, unit_pair(l0, m0, ctx), ctx, table).kappa
        ratio = (metric(y20, y20, ctx).real / 6) / metric(xi, xi, ctx).real
        assert_allclose(kg, ky * ratio, rtol=1e-12)
        assert kg < 0 and ky < 0
        if alpha == 0:
            assert_allclose(kg, ky, rtol=1e-12)


def test_printed_k_breaks_zonal_reduction(table3):
    ctx = MetricContext(0.0)
    xi, eta = zonal_plane(1, 0, 1, 1, ctx)
    rep = sectional(xi, eta, ctx, table3)
    printed = curvature_formula(xi, eta, eta, xi, ctx, table3, printed_k=True).real / rep.gram
    assert_allclose(rep.kappa, 3 / (32 * math.pi), rtol=1e-12)
    assert abs(printed - rep.kappa) > 1e-3
