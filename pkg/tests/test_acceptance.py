"""Acceptance gate: one test per criterion, each at its stated tolerance.

A PASS/FAIL line per criterion is printed in the terminal summary.
"""
import json
import math

import numpy as np

from qgc import oracles
from qgc.cli import run
from qgc.curvature import figure2_sweep, tradewind_limit, tradewind_sectional, tradewind_theta
from qgc.dynamics import FlowState, integrate
from qgc.extension import HatVector, MetricContext
from qgc.forecast import ForecastParams, growth_after_months, months_to_exponent
from qgc.structure import build_table


def test_criterion_01_backend_agreement(acceptance):
    res = oracles.backend_agreement(8)
    assert acceptance(1, res < 1e-10, f"analytic vs quadrature, l <= 8: max diff {res:.2e}")


def test_criterion_02_formula_equals_koszul(acceptance):
    basis = oracles.curvature_basis(3, alphas=(0.0, 0.7))
    rand = oracles.curvature_random(3, n=100, alphas=(0.0, 0.7))
    ok = basis < 1e-10 and rand < 1e-10
    assert acceptance(2, ok, f"basis l <= 3 {basis:.2e}, 100 random {rand:.2e}")


def test_criterion_03_zonal_reduction(acceptance):
    general, closed = oracles.zonal_checks(6)
    ok = closed < 1e-12 and general < 1e-10
    assert acceptance(3, ok, f"l0 <= 6: closed form {closed:.2e}, general {general:.2e}")


def test_criterion_04_appendix_identity(acceptance):
    res = oracles.appendix_identity(10, alphas=(0.0, 0.5, 2.0))
    assert acceptance(4, res < 1e-14, f"l0 <= 10: max residual {res:.2e}")


def test_criterion_05_tradewind_limit(acceptance):
    worst_k = worst_t = 0.0
    for a in (0.0, 2.0, 12.0):
        for alpha in (0.0, 1.0):
            k = tradewind_sectional(a, alpha, 200, 200)
            worst_k = max(worst_k, abs(k / tradewind_limit(a, alpha) - 1))
            worst_t = max(worst_t, abs(200 ** 2 * tradewind_theta(200, 200, alpha) / -4 - 1))
    ok = worst_k < 0.05 and worst_t < 0.05
    assert acceptance(5, ok, f"l0 = 200: kappa off limit {worst_k:.2%}, l0^2 Theta off -4 {worst_t:.2%}")


def test_criterion_06_figure2(acceptance):
    rows = figure2_sweep([0.0, 12.0], range(1, 61))
    k0 = {l0: k for a, l0, k in rows if a == 0.0}
    k12 = {l0: k for a, l0, k in rows if a == 12.0}
    threshold = next(l0 for l0 in range(2, 61) if all(k12[j] < 0 for j in range(l0, 61)))
    pointwise = all(k == tradewind_sectional(a, 0.0, l0, l0) for a, l0, k in rows)
    ok = (k12[2] > 0 and k12[3] > 0 and threshold < 60
          and all(k0[l0] < 0 for l0 in range(2, 61)) and pointwise)
    assert acceptance(6, ok, f"a=12 positive at l0=2,3, negative from l0={threshold}; a=0 negative")


def test_criterion_07_forecast(acceptance):
    months = months_to_exponent(5, ForecastParams(a=2, beta_luk=1 / 16))
    grow = growth_after_months(2, ForecastParams(a=2, beta_luk=1 / 4)).rounded
    base = growth_after_months(1, ForecastParams(a=0, beta_luk=1 / 4)).rounded
    ok = abs(months - 4.47) <= 0.05 and abs(grow - 4.47) <= 0.05 and base == 5.0
    assert acceptance(7, ok, f"months to 1e5 {months:.4f}, log10 growth {grow:.4f}, a=0 exponent {base}")


def test_criterion_08_dynamics(acceptance):
    steady = oracles.steady_states(5)
    table = build_table(5)
    u = HatVector.random_real(5, np.random.default_rng(2024), central=0.0)
    state = FlowState(HatVector((0.3 * u).coeffs, 1.5), 0.0, MetricContext(0.7), table)
    traj = integrate(state, 1e-3, 10_000, record_every=500)
    drift = traj.energy_drift()
    central = all(c == 1.5 for c in traj.centrals)
    ok = steady < 1e-12 and drift < 1e-8 and central
    assert acceptance(8, ok, f"steady {steady:.2e}, energy drift {drift:.2e} over 1e4 steps, "
                             f"central constant {central}")


def test_criterion_09_algebra(acceptance):
    tol = oracles.DEFAULT_TOLERANCES
    res = oracles.algebra_suites(3)
    res["sign_flip"] = oracles.sign_flip(3)
    failed = [k for k, v in res.items() if not v < tol[k]]
    worst = max(res.values())
    assert acceptance(9, not failed, f"{len(res)} suites, worst {worst:.2e}, failed {failed}")


def test_criterion_10_report(acceptance, capsys):
    code = run(["report", "--lmax", "3"])
    d = json.loads(capsys.readouterr().out)
    sweep = d["printed_k_deltas"]["sweep"]
    y20 = d["tradewind_vs_y20"]
    ok = (code == 0 and d["all_oracles_pass"] is True
          and all(s["max_abs_delta_corrected"] < 1e-10 for s in sweep)
          and all(s["max_abs_delta_printed"] > 1e-3 for s in sweep)
          and "verdict" in y20 and y20["max_abs_constants_g_minus_y20_over_sqrt6"] < 1e-12
          and all(r["passed"] for r in d["oracle_residuals"]))
    worst = max(s["max_abs_delta_printed"] for s in sweep)
    assert acceptance(10, ok, f"printed k delta up to {worst:.3f}, corrected k exact, "
                              f"{len(d['oracle_residuals'])} oracle suites green")
    assert math.isfinite(worst)
