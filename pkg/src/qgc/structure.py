"""Poisson-bracket structure constants of the spherical-harmonic basis.

``{Y_p, Y_q} = sum_r G^r_{pq} Y_r`` with ``{f, g} = f_lambda g_mu - f_mu g_lambda``.
Two independent backends compute ``G``: quadrature of the grid bracket
(ground truth) and a Wigner-3j closed form.  The module also provides the
operator ``T`` (metric representative of the cocycle), the cocycle itself and
the tradewind generator ``g(mu) = 1/2 sqrt(15/(8 pi)) mu^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping

import numpy as np

from .errors import DomainError, GridTooSmallError
from .harmonics import (ModeIndex, SphereGrid, _cs_phase, _d_mu, _fourier,
                        dense_from_map, modes_up_to, synthesis)
from .wigner import wigner_3j

ZERO_THRESHOLD = 1e-12
BACKENDS = ("quadrature", "analytic")

Entry = tuple  # (ModeIndex, complex)


def _as_mode(p) -> ModeIndex:
    return p if isinstance(p, ModeIndex) else ModeIndex(*p)


# ---------------------------------------------------------------- quadrature

def _mode_fields(mode: ModeIndex, grid: SphereGrid):
    """Samples of ``(Y, d_lambda Y, d_mu Y)`` for one basis harmonic."""
    coeffs = dense_from_map({mode: 1.0}, mode.l)
    y = synthesis(coeffs, grid)
    return y, 1j * mode.m * y, _d_mu(coeffs, grid)


def _project_all(samples: np.ndarray, grid: SphereGrid, lmax: int) -> list:
    four = _fourier(samples, grid)
    wl = grid.legendre * grid.weights
    out = []
    for l in range(lmax + 1):
        for m in range(-l, l + 1):
            val = _cs_phase(m) * (wl[l, abs(m)] @ four[:, m % grid.n_lambda])
            if abs(val) > ZERO_THRESHOLD:
                out.append((ModeIndex(l, m), complex(val)))
    return out


def _check_grid(p: ModeIndex, q: ModeIndex, grid: SphereGrid):
    top = max(p.l + q.l - 1, 0)
    # projecting onto targets of degree <= top needs a 2*top-exact rule
    if grid.n_mu < top + 1 or grid.n_lambda < 2 * top + 1 or grid.band < max(p.l, q.l, top):
        raise GridTooSmallError(
            f"grid (n_mu={grid.n_mu}, n_lambda={grid.n_lambda}) too small for "
            f"bracket of {p} and {q}")


def structure_constants_quadrature(p, q, grid: SphereGrid | None = None) -> list[Entry]:
    """All nonzero ``G^r_{pq}`` by sampling the bracket and projecting.

    Every target up to degree ``l_p + l_q - 1`` (all orders) is projected, so
    the selection rules are an output here, not an assumption.
    """
    p, q = _as_mode(p), _as_mode(q)
    if grid is None:
        grid = SphereGrid.for_lmax(max(p.l, q.l, 1))
    _check_grid(p, q, grid)
    _, yl_p, ym_p = _mode_fields(p, grid)
    _, yl_q, ym_q = _mode_fields(q, grid)
    bracket = yl_p * ym_q - ym_p * yl_q
    return _project_all(bracket, grid, max(p.l + q.l - 1, 0))


# ------------------------------------------------------------------ analytic

def bracket_targets(p: ModeIndex, q: ModeIndex) -> Iterable[ModeIndex]:
    """Targets allowed by the selection rules for the pair ``(p, q)``."""
    m3 = p.m + q.m
    if p.l == 0 or q.l == 0:
        return
    for l3 in range(max(abs(p.l - q.l) + 1, abs(m3)), p.l + q.l):
        if (p.l + q.l + l3) % 2 == 1:
            yield ModeIndex(l3, m3)


@lru_cache(maxsize=None)
def _analytic_value(l1, m1, l2, m2, l3, m3) -> complex:
    """``G = i (-1)^m3 N sqrt(l1(l1+1) l2(l2+1)) (l1 l2 l3; m1 m2 -m3)(l1 l2 l3; 1 -1 0)``."""
    if (l1 + l2 + l3) % 2 == 0 or m3 != m1 + m2:
        return 0j
    norm = math.sqrt((2 * l1 + 1) * (2 * l2 + 1) * (2 * l3 + 1) / (4 * math.pi))
    grad = math.sqrt(l1 * (l1 + 1) * l2 * (l2 + 1))
    w = wigner_3j(l1, l2, l3, m1, m2, -m3) * wigner_3j(l1, l2, l3, 1, -1, 0)
    sign = -1.0 if m3 % 2 else 1.0
    return 1j * sign * norm * grad * w


def structure_constants_analytic(p, q) -> list[Entry]:
    """Nonzero ``G^r_{pq}`` from the Wigner-3j closed form."""
    p, q = _as_mode(p), _as_mode(q)
    out = []
    for r in bracket_targets(p, q):
        val = _analytic_value(p.l, p.m, q.l, q.m, r.l, r.m)
        if abs(val) > ZERO_THRESHOLD:
            out.append((r, val))
    return out


# --------------------------------------------------------------------- table

@dataclass(frozen=True)
class StructureTable:
    """Bracket constants for every ordered pair of modes with ``l <= lmax``.

    ``entries[(p, q)]`` is a tuple of ``(target, value)`` sorted by target.
    Targets are stored untruncated (up to ``l_p + l_q - 1``); truncation is
    applied by the consumers.
    """

    lmax: int
    entries: Mapping
    backend: str = "analytic"
    sign: int = 1

    def get(self, p, q) -> tuple:
        try:
            return self.entries[(p, q)]
        except KeyError:
            raise DomainError(f"pair ({p}, {q}) outside table with lmax={self.lmax}") from None

    def value(self, p, q, r) -> complex:
        for target, val in self.get(p, q):
            if target == r:
                return val
        return 0j

    def flipped(self) -> "StructureTable":
        """Table for the opposite bracket sign convention ``{f,g}_P = -{f,g}``."""
        entries = {k: tuple((r, -v) for r, v in vals) for k, vals in self.entries.items()}
        return StructureTable(self.lmax, entries, self.backend, -self.sign)

    def modes(self) -> list[ModeIndex]:
        return modes_up_to(self.lmax)

    def records(self) -> list[dict]:
        """Flat, lexicographically sorted records ``{l1,m1,l2,m2,l3,m3,re,im}``."""
        rows = []
        for (p, q), vals in self.entries.items():
            for r, v in vals:
                rows.append({"l1": p[0], "m1": p[1], "l2": q[0], "m2": q[1],
                             "l3": r[0], "m3": r[1], "re": v.real, "im": v.imag})
        rows.sort(key=lambda d: (d["l1"], d["m1"], d["l2"], d["m2"], d["l3"], d["m3"]))
        return rows


def _quadrature_entries(lmax: int) -> dict:
    grid = SphereGrid.for_lmax(lmax)
    modes = modes_up_to(lmax)
    fields = {p: _mode_fields(p, grid) for p in modes}
    entries = {}
    for p in modes:
        _, yl_p, ym_p = fields[p]
        for q in modes:
            _, yl_q, ym_q = fields[q]
            if p.l == 0 or q.l == 0:
                entries[(p, q)] = ()
                continue
            bracket = yl_p * ym_q - ym_p * yl_q
            entries[(p, q)] = tuple(_project_all(bracket, grid, p.l + q.l - 1))
    return entries


def build_table(lmax: int, backend: str = "analytic") -> StructureTable:
    """Populate all ordered pairs with ``l1, l2 <= lmax``."""
    if lmax < 1:
        raise DomainError("build_table needs lmax >= 1")
    if backend not in BACKENDS:
        raise DomainError(f"unknown backend {backend!r}; choose from {BACKENDS}")
    return _build_table_cached(int(lmax), backend)


@lru_cache(maxsize=8)
def _build_table_cached(lmax: int, backend: str) -> StructureTable:
    if backend == "quadrature":
        entries = _quadrature_entries(lmax)
    else:
        modes = modes_up_to(lmax)
        entries = {(p, q): tuple(structure_constants_analytic(p, q))
                   for p in modes for q in modes}
    return StructureTable(lmax, entries, backend)


# ------------------------------------------------------- cocycle, T operator

def metric_weight(l: int, alpha: float) -> float:
    return alpha * alpha + l * (l + 1)


def t_operator(mode, alpha: float) -> tuple:
    """``T e_lm = -i m / (alpha^2 + l(l+1)) e_lm``; zero for ``m = 0``."""
    mode = _as_mode(mode)
    if mode.m == 0:
        return mode, 0j
    return mode, -1j * mode.m / metric_weight(mode.l, alpha)


def cocycle(p, q) -> complex:
    """``Omega(e_p, e_q) = -i (-1)^{m_p} m_p`` if ``q = (l_p, -m_p)``, else 0."""
    p, q = _as_mode(p), _as_mode(q)
    if p.l != q.l or q.m != -p.m:
        return 0j
    return -1j * (-1) ** (p.m % 2) * p.m


def cocycle_coeffs(x: Mapping, y: Mapping) -> complex:
    """Bilinear extension of ``cocycle`` to coefficient maps."""
    total = 0j
    for (l, m), xv in x.items():
        if m == 0:
            continue
        yv = y.get((l, -m))
        if yv is not None:
            total += xv * yv * (-1j) * (-1) ** (m % 2) * m
    return total


# ----------------------------------------------------------------- tradewind

TRADEWIND_AMPLITUDE = 0.5 * math.sqrt(15.0 / (8.0 * math.pi))


def _a_coef(l: int, m: int) -> float:
    return (l * l - m * m) / (4 * l * l - 1)


def tradewind_constants(l0: int, m0: int) -> list[Entry]:
    """Nonzero constants of ``{g, Y_{l0 m0}}`` for ``g = 1/2 sqrt(15/8pi) mu^2``.

    Uses the mu-recursion of the Legendre functions: the bracket only reaches
    ``(l0 - 1, m0)`` and ``(l0 + 1, m0)``.
    """
    if l0 < 1 or abs(m0) > l0:
        raise DomainError(f"tradewind constants need l0 >= 1 and |m0| <= l0, got ({l0},{m0})")
    if m0 == 0:
        return []
    pref = -1j * m0 * math.sqrt(15.0 / (8.0 * math.pi))
    out = []
    a_low = _a_coef(l0, m0)
    if a_low > 0:
        out.append((ModeIndex(l0 - 1, m0), pref * math.sqrt(a_low)))
    out.append((ModeIndex(l0 + 1, m0), pref * math.sqrt(_a_coef(l0 + 1, m0))))
    return out


@dataclass(frozen=True)
class TradewindGenerator:
    """Stream function ``g(mu) = 1/2 sqrt(15/(8 pi)) mu^2`` as a named generator.

    Brackets go through :func:`tradewind_constants`; norms need the full
    spectrum, whose constant ``(0, 0)`` part carries ``alpha^2`` weight.
    """

    spectrum: dict = field(default_factory=lambda: {
        ModeIndex(0, 0): TRADEWIND_AMPLITUDE * math.sqrt(4.0 * math.pi) / 3.0,
        ModeIndex(2, 0): 1.0 / math.sqrt(6.0),
    })

    def bracket(self, mode) -> list[Entry]:
        mode = _as_mode(mode)
        return tradewind_constants(mode.l, mode.m) if mode.l >= 1 else []

    def samples(self, grid: SphereGrid) -> np.ndarray:
        mu, _ = grid.mesh()
        return TRADEWIND_AMPLITUDE * mu ** 2 + 0j
