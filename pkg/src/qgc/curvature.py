"""Curvature of the extended algebra and its sectional specialisations.

Two independent routes evaluate ``<<R(X, Y) Z, W>>``:

* :func:`curvature_formula` sums the closed coefficient expression built from
  ``Gamma = d G - 1/2 (a D + a D)``, ``k``-weighted bracket terms and three
  Kronecker tails;
* :func:`curvature_koszul` assembles
  ``<<nabla_X Z, nabla_Y W>> - <<nabla_Y Z, nabla_X W>>
  + 1/2 <<[X,Y], [Z,W] - coad(Z,W) + coad(W,Z)>>`` from the algebra operations.

The second is treated as ground truth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import DegeneratePlaneError, DomainError
from .extension import (NO_TRUNCATION, HatVector, MetricContext, apply_t, bracket_hat,
                        coad_hat, d_coef, field_bracket, k_coef, metric, nabla_hat)
from .harmonics import ModeIndex
from .structure import StructureTable, TradewindGenerator

SPEED_SQ_PREFACTOR = 15.0 / (32.0 * math.pi)


# ------------------------------------------------------------ formula route

def _gamma(x: HatVector, z: HatVector, ctx: MetricContext, table: StructureTable) -> dict:
    out: dict = {}
    for p, xv in x.coeffs.items():
        for q, zv in z.coeffs.items():
            for r, g in table.get(p, q):
                out[r] = out.get(r, 0) + xv * zv * d_coef(p.l, q.l, r.l, ctx.alpha) * g
    for scale, src in ((x.central, z.coeffs), (z.central, x.coeffs)):
        if scale != 0:
            for k, v in apply_t(src, ctx, table.sign).items():
                out[k] = out.get(k, 0) - 0.5 * scale * v
    return out


def _k_term(z: HatVector, w: HatVector, ctx: MetricContext, table: StructureTable,
            printed_k: bool) -> dict:
    out: dict = {}
    for r, zv in z.coeffs.items():
        for s, wv in w.coeffs.items():
            for t, g in table.get(r, s):
                out[t] = out.get(t, 0) + zv * wv * k_coef(r.l, s.l, t.l, ctx.alpha, printed_k) * g
    for scale, src in ((w.central, z.coeffs), (-z.central, w.coeffs)):
        if scale != 0:
            for k, v in apply_t(src, ctx, table.sign).items():
                out[k] = out.get(k, 0) + 0.5 * scale * v
    return out


def _weighted_pair(f: Mapping, h: Mapping, ctx: MetricContext) -> complex:
    total = 0j
    for (l, m), fv in f.items():
        hv = h.get((l, -m))
        if hv is not None:
            total += (-1) ** (m % 2) * ctx.weight(l) * fv * hv
    return total


def _kronecker(x: HatVector, y: HatVector) -> complex:
    """``sum_p x_p y_{(l_p,-m_p)} m_p (-1)^{m_p}``: the delta-contracted tail factor."""
    total = 0j
    for (l, m), xv in x.coeffs.items():
        if m:
            yv = y.coeffs.get((l, -m))
            if yv is not None:
                total += xv * yv * m * (-1) ** (m % 2)
    return total


def curvature_formula(x: HatVector, y: HatVector, z: HatVector, w: HatVector,
                      ctx: MetricContext, table: StructureTable,
                      printed_k: bool = False) -> complex:
    """``<<R(x, y) z, w>>`` from the structure-constant curvature formula.

    The sum over target modes is finite because brackets only reach
    ``l <= l1 + l2 - 1``.  ``printed_k`` switches to the published
    ``k`` coefficient with its extra leading ``1`` (discrepancy report only).
    """
    main = (_weighted_pair(_gamma(x, z, ctx, table), _gamma(y, w, ctx, table), ctx)
            - _weighted_pair(_gamma(y, z, ctx, table), _gamma(x, w, ctx, table), ctx)
            + _weighted_pair(field_bracket(x.coeffs, y.coeffs, table),
                             _k_term(z, w, ctx, table, printed_k), ctx))
    tail = (-0.25 * (_kronecker(x, z) * _kronecker(y, w) - _kronecker(y, z) * _kronecker(x, w))
            - 0.5 * _kronecker(x, y) * _kronecker(z, w))
    return main + tail


# ------------------------------------------------------------- Koszul route

def curvature_koszul(x: HatVector, y: HatVector, z: HatVector, w: HatVector,
                     ctx: MetricContext, table: StructureTable) -> complex:
    """``<<R(x, y) z, w>>`` assembled from connection, bracket and coadjoint."""
    kw = dict(lmax=NO_TRUNCATION)
    first = metric(nabla_hat(x, z, ctx, table, **kw), nabla_hat(y, w, ctx, table, **kw), ctx)
    second = metric(nabla_hat(y, z, ctx, table, **kw), nabla_hat(x, w, ctx, table, **kw), ctx)
    xy = bracket_hat(x, y, table, **kw)
    rest = (bracket_hat(z, w, table, **kw) - coad_hat(z, w, ctx, table, **kw)
            + coad_hat(w, z, ctx, table, **kw))
    return first - second + 0.5 * metric(xy, rest, ctx)


# ------------------------------------------------------------ dense tensors

class _Packer:
    """Maps coefficient dicts onto a shared dense target basis plus a central slot."""

    def __init__(self, dicts, ctx: MetricContext):
        keys = sorted({k for d in dicts for k in d})
        self.index = {k: i for i, k in enumerate(keys)}
        n = len(keys)
        self.gram = np.zeros((n + 1, n + 1))
        for k, i in self.index.items():
            j = self.index.get((k[0], -k[1]))
            if j is not None:
                self.gram[i, j] = (-1) ** (k[1] % 2) * ctx.weight(k[0])
        self.size = n + 1

    def pack(self, coeffs: Mapping, central=0.0) -> np.ndarray:
        v = np.zeros(self.size, dtype=complex)
        for k, val in coeffs.items():
            v[self.index[k]] = val
        v[-1] = central
        return v


def _pairwise(fn, vectors):
    return [[fn(x, y) for y in vectors] for x in vectors]


def curvature_tensor(vectors, ctx: MetricContext, table: StructureTable,
                     route: str = "koszul", printed_k: bool = False) -> np.ndarray:
    """``R[i,j,k,l] = <<R(v_i, v_j) v_k, v_l>>`` for every 4-tuple of ``vectors``.

    Pairwise operations are evaluated once and contracted with einsum, so the
    cost is quadratic in ``len(vectors)`` plus one dense contraction.
    """
    vectors = list(vectors)
    if route == "formula":
        gam = _pairwise(lambda x, z: _gamma(x, z, ctx, table), vectors)
        brk = _pairwise(lambda x, y: field_bracket(x.coeffs, y.coeffs, table), vectors)
        kt = _pairwise(lambda z, w: _k_term(z, w, ctx, table, printed_k), vectors)
        pk = _Packer([d for rows in (gam, brk, kt) for row in rows for d in row], ctx)
        G = np.array([[pk.pack(d) for d in row] for row in gam])
        B = np.array([[pk.pack(d) for d in row] for row in brk])
        K = np.array([[pk.pack(d) for d in row] for row in kt])
        M = pk.gram
        S = np.array([[_kronecker(x, y) for y in vectors] for x in vectors])
        R = (np.einsum("ika,ab,jlb->ijkl", G, M, G, optimize=True)
             - np.einsum("jka,ab,ilb->ijkl", G, M, G, optimize=True)
             + np.einsum("ija,ab,klb->ijkl", B, M, K, optimize=True))
        R += -0.25 * (np.einsum("ik,jl->ijkl", S, S) - np.einsum("jk,il->ijkl", S, S))
        R += -0.5 * np.einsum("ij,kl->ijkl", S, S)
        return R
    if route != "koszul":
        raise DomainError(f"unknown curvature route {route!r}")
    kw = dict(lmax=NO_TRUNCATION)
    nab = _pairwise(lambda x, y: nabla_hat(x, y, ctx, table, **kw), vectors)
    brk = _pairwise(lambda x, y: bracket_hat(x, y, table, **kw), vectors)
    cod = _pairwise(lambda x, y: coad_hat(x, y, ctx, table, **kw), vectors)
    pk = _Packer([h.coeffs for rows in (nab, brk, cod) for row in rows for h in row], ctx)
    pk.gram[-1, -1] = 1.0
    N = np.array([[pk.pack(h.coeffs, h.central) for h in row] for row in nab])
    B = np.array([[pk.pack(h.coeffs, h.central) for h in row] for row in brk])
    C = np.array([[pk.pack(h.coeffs, h.central) for h in row] for row in cod])
    M = pk.gram
    rest = B - C + C.transpose(1, 0, 2)
    return (np.einsum("ika,ab,jlb->ijkl", N, M, N, optimize=True)
            - np.einsum("jka,ab,ilb->ijkl", N, M, N, optimize=True)
            + 0.5 * np.einsum("ija,ab,klb->ijkl", B, M, rest, optimize=True))


# ---------------------------------------------------------------- sectional

@dataclass(frozen=True)
class SectionalReport:
    kappa: float
    numerator: float
    gram: float
    plane: str = ""


def sectional(xi: HatVector, eta: HatVector, ctx: MetricContext, table: StructureTable,
              plane: str = "", real_tol: float = 1e-9) -> SectionalReport:
    """Gram-normalised sectional curvature ``<<R(xi,eta)eta,xi>> / Gram``.

    The plane is degenerate when ``Gram < 1e-12 |xi|^2 |eta|^2``.
    """
    for v in (xi, eta):
        if not v.is_real(real_tol):
            raise DomainError("sectional curvature needs real vectors")
    nxx = metric(xi, xi, ctx).real
    nyy = metric(eta, eta, ctx).real
    nxy = metric(xi, eta, ctx).real
    gram = nxx * nyy - nxy * nxy
    if gram < 1e-12 * abs(nxx * nyy) or gram <= 0:
        raise DegeneratePlaneError(f"degenerate plane (Gram determinant {gram:.3e})")
    num = curvature_koszul(xi, eta, eta, xi, ctx, table).real
    return SectionalReport(num / gram, num, gram, plane)


def unit_pair(l0: int, m0: int, ctx: MetricContext) -> HatVector:
    """Real unit vector ``eta_{l0 m0} e_{l0 m0} + eta_{l0,-m0} e_{l0,-m0}``.

    Equal moduli and the reality relation, so that
    ``2 (-1)^m0 (alpha^2 + l0(l0+1)) eta_{l0 m0} eta_{l0,-m0} = 1``.
    """
    w = ctx.weight(l0)
    if m0 == 0:
        return HatVector({ModeIndex(l0, 0): 1.0 / math.sqrt(w)})
    c = 1.0 / math.sqrt(2.0 * w)
    return HatVector({ModeIndex(l0, m0): c, ModeIndex(l0, -m0): (-1) ** (m0 % 2) * c})


def _check_l0m0(l0: int, m0: int, need_m: bool = False):
    if l0 < 1 or abs(m0) > l0:
        raise DomainError(f"need l0 >= 1 and |m0| <= l0, got l0={l0}, m0={m0}")
    if need_m and m0 == 0:
        raise DomainError("need |m0| >= 1")


def zonal_plane(nu: float, a: float, l0: int, m0: int, ctx: MetricContext):
    """``xi = (nu sqrt(4pi/3) e_10, a)`` and the unit ``(l0, +-m0)`` direction."""
    _check_l0m0(l0, m0)
    xi = HatVector({ModeIndex(1, 0): nu * math.sqrt(4.0 * math.pi / 3.0)}, a)
    return xi, unit_pair(l0, m0, ctx)


def tradewind_plane(a: float, l0: int, m0: int, ctx: MetricContext,
                    generator: TradewindGenerator | None = None):
    """``xi = (sgrad g, a)`` with its full spectrum, and the unit ``(l0, +-m0)`` direction."""
    _check_l0m0(l0, m0)
    generator = generator or TradewindGenerator()
    return HatVector(generator.spectrum, a), unit_pair(l0, m0, ctx)


def zonal_sectional(nu: float, a: float, alpha: float, l0: int, m0: int) -> float:
    """Closed form for the plane of the zonal flow ``nu sqrt(4pi/3) e_10`` and ``(l0, +-m0)``."""
    _check_l0m0(l0, m0)
    s = alpha * alpha + 2.0
    w = alpha * alpha + l0 * (l0 + 1)
    den = (nu * nu * 4.0 * math.pi / 3.0 * s + a * a) * w * w
    if den <= 0:
        raise DomainError("zonal sectional curvature has a vanishing denominator")
    return m0 * m0 / den * (nu * nu / 4.0 * s * s + nu * a / 2.0 * s + a * a / 4.0)


def tradewind_theta(l0: int, m0: int, alpha: float) -> float:
    """The bracketed ``Theta`` factor of the tradewind curvature, as published.

    Helpers: ``a^l_m = (l^2-m^2)/(4l^2-1)``, ``b_l = w_l / (alpha^2 + l(l-1))``,
    ``c_l = 6 / w_l``, ``x_l = alpha^2 / w_l``.  Terms carrying the factor
    ``a^{l0}_{m0}`` are skipped when it vanishes (``|m0| = l0``), where ``b_{l0}``
    may be singular.
    """
    _check_l0m0(l0, m0, need_m=True)
    al2 = alpha * alpha

    def w(l):
        return al2 + l * (l + 1)

    def b(l):
        return w(l) / (al2 + l * (l - 1))

    def x(l):
        return al2 / w(l)

    A = (l0 * l0 - m0 * m0) / (4 * l0 * l0 - 1)
    B = ((l0 + 1) ** 2 - m0 * m0) / (4 * (l0 + 1) ** 2 - 1)
    c = 6.0 / w(l0)
    bp = b(l0 + 1)
    xp = x(l0 + 1)
    theta = ((1 - c) ** 2 * B / bp + 2 * (1 + c) * B - 3 * B * bp
             + xp * B * bp * (xp - 2.0 / bp * (1 - c) + 2))
    if A != 0:
        b0 = b(l0)
        xm = x(l0 - 1)
        theta += ((1 - c) ** 2 * A * b0 + 2 * (1 + c) * A - 3 * A / b0
                  + xm * A / b0 * (xm - 2 * b0 * (1 - c) + 2))
    return theta


def tradewind_norm(a: float, alpha: float) -> float:
    """``<<xi, xi>> = 3/8 alpha^2 + 1 + a^2`` for ``xi = (sgrad g, a)``."""
    return 0.375 * alpha * alpha + 1.0 + a * a


def tradewind_sectional(a: float, alpha: float, l0: int, m0: int) -> float:
    """Closed-form sectional curvature of the tradewind plane."""
    theta = tradewind_theta(l0, m0, alpha)
    w = alpha * alpha + l0 * (l0 + 1)
    return (SPEED_SQ_PREFACTOR * m0 * m0 * theta
            + 0.25 * a * a * m0 * m0 / (w * w)) / tradewind_norm(a, alpha)


def tradewind_limit(a: float, alpha: float) -> float:
    """Large-``l0`` limit along ``m0 = l0``: ``-15 / (8 pi (3/8 alpha^2 + 1 + a^2))``."""
    return -15.0 / (8.0 * math.pi) / tradewind_norm(a, alpha)


def figure2_sweep(a_values, l0_values, alpha: float = 0.0) -> list[tuple]:
    """Rows ``(a, l0, kappa)`` of the tradewind curvature along ``m0 = l0``."""
    return [(float(a), int(l0), tradewind_sectional(a, alpha, l0, l0))
            for a in a_values for l0 in l0_values]
