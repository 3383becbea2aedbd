import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from qgc.errors import DomainError, GridTooSmallError
from qgc.harmonics import (ModeIndex, SphereGrid, analysis, modes_up_to, poisson_bracket_grid,
                           sample_coeffs)
from qgc.structure import (TradewindGenerator, build_table, cocycle, structure_constants_analytic,
                           structure_constants_quadrature, t_operator, tradewind_constants)

mode_pairs = st.tuples(
    st.integers(1, 5).flatmap(lambda l: st.tuples(st.just(l), st.integers(-l, l))),
    st.integers(1, 5).flatmap(lambda l: st.tuples(st.just(l), st.integers(-l, l))))


def test_single_pair_examples():
    got = dict(structure_constants_quadrature((1, 0), (2, 1)))
    assert list(got) == [(2, 1)]
    assert_allclose(got[(2, 1)], -1j * math.sqrt(3 / (4 * math.pi)), atol=1e-13)
    assert structure_constants_quadrature((1, 0), (1, 0)) == []
    assert structure_constants_analytic((0, 0), (2, 1)) == []


@given(st.integers(1, 8).flatmap(lambda l: st.tuples(st.just(l), st.integers(-l, l))))
def test_y10_acts_as_rotation(mode):
    # {Y_10, Y_lm} = -i m sqrt(3/(4 pi)) Y_lm
    got = dict(structure_constants_analytic((1, 0), mode))
    l, m = mode
    if m == 0:
        assert got == {}
    else:
        assert list(got) == [mode]
        assert_allclose(got[mode], -1j * m * math.sqrt(3 / (4 * math.pi)), atol=1e-13)


def test_backends_agree_up_to_4():
    qa, an = build_table(4, "quadrature"), build_table(4, "analytic")
    for key in an.entries:
        a, b = dict(an.entries[key]), dict(qa.entries[key])
        assert set(a) == set(b)
        for r in a:
            assert abs(a[r] - b[r]) < 1e-10


def test_selection_rules_from_quadrature():
    table = build_table(6, "quadrature")
    count = 0
    for (p, q), vals in table.entries.items():
        for r, v in vals:
            count += 1
            assert r.m == p.m + q.m
            assert (p.l + q.l + r.l) % 2 == 1
            assert abs(p.l - q.l) + 1 <= r.l <= p.l + q.l - 1
    assert count > 1000


@given(mode_pairs)
def test_antisymmetry_and_conjugation(pq):
    p, q = ModeIndex(*pq[0]), ModeIndex(*pq[1])
    a = dict(structure_constants_analytic(p, q))
    b = dict(structure_constants_analytic(q, p))
    assert set(a) == set(b)
    for r in a:
        assert abs(a[r] + b[r]) < 1e-13
    # G^{rbar}_{pbar qbar} = conj(G^r_{pq})
    c = dict(structure_constants_analytic((p.l, -p.m), (q.l, -q.m)))
    for r, v in a.items():
        assert abs(c[(r.l, -r.m)] - np.conj(v)) < 1e-13


@given(st.integers(0, 2**31))
def test_cyclic_triple_integral(seed):
    # int Y_p {Y_q, Y_r} is invariant under cyclic shifts of (p, q, r)
    rng = np.random.default_rng(seed)
    table = build_table(4)
    ms = modes_up_to(4, 1)
    p, q, r = (ms[i] for i in rng.integers(0, len(ms), 3))

    def trip(a, b, c):
        # sum_s G^s_{bc} int Y_a Y_s = G^{abar}_{bc} (-1)^{m_a}
        return table.value(b, c, (a.l, -a.m)) * (-1) ** (a.m % 2)

    assert abs(trip(p, q, r) - trip(q, r, p)) < 1e-12
    assert abs(trip(p, q, r) - trip(r, p, q)) < 1e-12


def test_table_records_sorted_and_flipped():
    t = build_table(2)
    rows = t.records()
    keys = [(r["l1"], r["m1"], r["l2"], r["m2"], r["l3"], r["m3"]) for r in rows]
    assert keys == sorted(keys)
    f = t.flipped()
    assert f.sign == -1
    assert f.value((1, 1), (2, 0), (2, 1)) == -t.value((1, 1), (2, 0), (2, 1))


def test_table_errors():
    with pytest.raises(DomainError):
        build_table(0)
    with pytest.raises(DomainError):
        build_table(2, "spline")
    with pytest.raises(DomainError):
        build_table(2).get((3, 0), (1, 0))
    with pytest.raises(GridTooSmallError):
        structure_constants_quadrature((3, 1), (3, 0), SphereGrid(3, 6))


def test_t_operator_and_cocycle_examples():
    assert t_operator((1, 0), 0.0)[1] == 0
    assert_allclose(t_operator((2, 1), 0.0)[1], -1j / 6)
    assert_allclose(t_operator((2, 1), 2.0)[1], -1j / 10)
    assert_allclose(cocycle((1, 1), (1, -1)), 1j)
    assert cocycle((1, 1), (1, 1)) == 0
    assert cocycle((2, 0), (2, 0)) == 0


def test_cocycle_is_integral_of_mu_bracket():
    # Omega(e_p, e_q) = int mu {Y_p, Y_q}
    grid = SphereGrid.for_lmax(4)
    mu, _ = grid.mesh()
    w = grid.weights[:, None] * (2 * np.pi / grid.n_lambda)
    for p in modes_up_to(3, 1):
        for q in modes_up_to(3, 1):
            br = poisson_bracket_grid(sample_coeffs({p: 1.0}, grid),
                                      sample_coeffs({q: 1.0}, grid), grid)
            ref = np.sum(mu * br * w)
            assert abs(cocycle(p, q) - ref) < 1e-12


@pytest.mark.parametrize("alpha", [0.0, 0.7])
def test_t_represents_cocycle(alpha):
    # <<T e_p, e_q>> = Omega(e_p, e_q) with weight alpha^2 + l(l+1)
    for p in modes_up_to(3, 1):
        q = ModeIndex(p.l, -p.m)
        w = alpha ** 2 + p.l * (p.l + 1)
        lhs = t_operator(p, alpha)[1] * w * (-1) ** (p.m % 2)
        assert abs(lhs - cocycle(p, q)) < 1e-14


def test_tradewind_constants_match_quadrature():
    grid = SphereGrid.for_lmax(7)
    gen = TradewindGenerator()
    g = gen.samples(grid)
    for p in modes_up_to(6, 1):
        br = poisson_bracket_grid(g, sample_coeffs({p: 1.0}, grid), grid)
        dense = analysis(br, grid, 7)
        got = dict(gen.bracket(p))
        for r in modes_up_to(7):
            assert abs(got.get(r, 0) - dense[r.l, r.m + 7]) < 1e-12


def test_tradewind_constants_examples():
    assert tradewind_constants(2, 0) == []
    low = dict(tradewind_constants(1, 1))
    assert list(low) == [(2, 1)]
    with pytest.raises(DomainError):
        tradewind_constants(0, 0)
    # g is Y_20 / sqrt(6) plus a constant
    t = build_table(6)
    for p in modes_up_to(6, 1):
        a = dict(tradewind_constants(p.l, p.m))
        b = {r: v / math.sqrt(6) for r, v in t.get((2, 0), p)}
        assert set(a) == set(b)
        for r in a:
            assert abs(a[r] - b[r]) < 1e-13
