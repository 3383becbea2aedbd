"""The centrally extended algebra: vectors, metric, bracket, coadjoint, connection.

A :class:`HatVector` ``(u, a)`` holds the stream-function spectrum of the field
``u = sum c_lm e_lm`` (``e_lm = sgrad Y_lm``) and the central component ``a``.
Everything is complex bilinear; real vectors are those with
``c_{l,-m} = (-1)^m conj(c_lm)`` and real central part.

Operations that produce new modes take ``lmax`` (default: the table's) and
``strict``.  Non-strict mode drops modes above ``lmax`` (Galerkin projection);
strict mode raises :class:`TruncationError` instead.  Pass ``lmax=None``
explicitly through :data:`NO_TRUNCATION` to keep every target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import DomainError, TruncationError
from .harmonics import ModeIndex, modes_up_to
from .structure import StructureTable, cocycle_coeffs, metric_weight

NO_TRUNCATION = 10**9
_DEFAULT = object()


@dataclass(frozen=True)
class MetricContext:
    """Froude number ``alpha`` fixing the weight ``alpha^2 + l(l+1)``."""

    alpha: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.alpha) or self.alpha < 0:
            raise DomainError(f"alpha must be finite and >= 0, got {self.alpha}")

    def weight(self, l: int) -> float:
        return metric_weight(l, self.alpha)


@dataclass(frozen=True)
class HatVector:
    coeffs: Mapping = field(default_factory=dict)
    central: complex = 0.0

    def __post_init__(self):
        cleaned = {}
        for key, v in self.coeffs.items():
            mode = key if isinstance(key, ModeIndex) else ModeIndex(*key)
            if v != 0:
                cleaned[mode] = cleaned.get(mode, 0) + v
        object.__setattr__(self, "coeffs", cleaned)

    @classmethod
    def basis(cls, l: int, m: int, central: complex = 0.0) -> "HatVector":
        return cls({ModeIndex(l, m): 1.0}, central)

    @classmethod
    def random_real(cls, lmax: int, rng: np.random.Generator, central=None,
                    lmin: int = 1) -> "HatVector":
        """Random real vector on modes ``lmin <= l <= lmax``."""
        coeffs = {}
        for l in range(lmin, lmax + 1):
            coeffs[ModeIndex(l, 0)] = rng.normal()
            for m in range(1, l + 1):
                c = complex(rng.normal(), rng.normal()) / math.sqrt(2)
                coeffs[ModeIndex(l, m)] = c
                coeffs[ModeIndex(l, -m)] = (-1) ** m * c.conjugate()
        if central is None:
            central = rng.normal()
        return cls(coeffs, central)

    @property
    def lmax(self) -> int:
        return max((mode.l for mode in self.coeffs), default=0)

    def __add__(self, other: "HatVector") -> "HatVector":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return HatVector(out, self.central + other.central)

    def __neg__(self) -> "HatVector":
        return HatVector({k: -v for k, v in self.coeffs.items()}, -self.central)

    def __sub__(self, other: "HatVector") -> "HatVector":
        return self + (-other)

    def __mul__(self, c) -> "HatVector":
        return HatVector({k: c * v for k, v in self.coeffs.items()}, c * self.central)

    __rmul__ = __mul__

    def reality_residual(self) -> float:
        """Max deviation from ``c_{l,-m} = (-1)^m conj(c_lm)`` and real central part."""
        res = abs(complex(self.central).imag)
        for (l, m), v in self.coeffs.items():
            partner = self.coeffs.get((l, -m), 0)
            res = max(res, abs(partner - (-1) ** (m % 2) * complex(v).conjugate()))
        return res

    def is_real(self, tol: float = 1e-12) -> bool:
        return self.reality_residual() <= tol

    def max_abs(self) -> float:
        return max((abs(v) for v in self.coeffs.values()), default=0.0)

    def truncated(self, lmax: int, strict: bool = False) -> "HatVector":
        return HatVector(_truncate(self.coeffs, lmax, strict), self.central)

    def sorted_items(self):
        return sorted(self.coeffs.items())


def _truncate(coeffs: Mapping, lmax: int, strict: bool) -> dict:
    out = {}
    for k, v in coeffs.items():
        if k[0] > lmax:
            if strict and abs(v) > 0:
                raise TruncationError(f"mode {k} exceeds working truncation lmax={lmax}")
            continue
        out[k] = v
    return out


def _resolve_lmax(lmax, table: StructureTable) -> int:
    return table.lmax if lmax is _DEFAULT else lmax


def _check_in_table(x: HatVector, table: StructureTable):
    if x.lmax > table.lmax:
        raise TruncationError(f"vector reaches l={x.lmax} but table has lmax={table.lmax}")


# -------------------------------------------------------------------- metric

def metric(x: HatVector, y: HatVector, ctx: MetricContext) -> complex:
    """``sum (alpha^2 + l(l+1)) (-1)^m x_lm y_{l,-m} + x.central * y.central``."""
    total = 0j
    for (l, m), xv in x.coeffs.items():
        yv = y.coeffs.get((l, -m))
        if yv is not None:
            total += ctx.weight(l) * (-1) ** (m % 2) * xv * yv
    return total + x.central * y.central


def apply_t(coeffs: Mapping, ctx: MetricContext, sign: int = 1) -> dict:
    """``T`` on a field spectrum: ``e_lm -> -i m / (alpha^2 + l(l+1)) e_lm``.

    ``sign = -1`` gives the operator for the opposite bracket convention.
    """
    return {k: -1j * sign * k[1] / ctx.weight(k[0]) * v
            for k, v in coeffs.items() if k[1] != 0}


def field_bracket(x: Mapping, y: Mapping, table: StructureTable) -> dict:
    """Untruncated bilinear contraction ``sum x_p y_q G^r_{pq} e_r``."""
    out: dict = {}
    for p, xv in x.items():
        for q, yv in y.items():
            for r, g in table.get(p, q):
                out[r] = out.get(r, 0) + xv * yv * g
    return out


def _finish(coeffs: dict, central, lmax: int, strict: bool) -> HatVector:
    return HatVector(_truncate(coeffs, lmax, strict), central)


# ------------------------------------------------------------------ brackets

def bracket_hat(x: HatVector, y: HatVector, table: StructureTable,
                lmax=_DEFAULT, strict: bool = False) -> HatVector:
    """``[(u,a),(v,b)] = ([u,v], Omega(u,v))``."""
    _check_in_table(x, table)
    _check_in_table(y, table)
    fld = field_bracket(x.coeffs, y.coeffs, table)
    return _finish(fld, table.sign * cocycle_coeffs(x.coeffs, y.coeffs), _resolve_lmax(lmax, table), strict)


def coad_hat(x: HatVector, y: HatVector, ctx: MetricContext, table: StructureTable,
             lmax=_DEFAULT, strict: bool = False) -> HatVector:
    """Coadjoint action of ``x`` on ``y``: ``(ad*_u v - b T u, 0)``.

    ``ad*_{e_p} e_q = -(w_q / w_r) G^r_{qp} e_r`` with ``w_l = alpha^2 + l(l+1)``;
    the defining identity is ``<<coad(x, y), z>> = -<<y, [x, z]>>``.
    """
    _check_in_table(x, table)
    _check_in_table(y, table)
    out: dict = {}
    for p, xv in x.coeffs.items():
        for q, yv in y.coeffs.items():
            wq = ctx.weight(q.l)
            for r, g in table.get(q, p):
                out[r] = out.get(r, 0) - xv * yv * (wq / ctx.weight(r.l)) * g
    if y.central != 0:
        for k, v in apply_t(x.coeffs, ctx, table.sign).items():
            out[k] = out.get(k, 0) - y.central * v
    return _finish(out, 0.0, _resolve_lmax(lmax, table), strict)


def d_coef(l1: int, l2: int, l3: int, alpha: float) -> float:
    """Connection coefficient ``d^{l3}_{l1 l2}``."""
    w3 = metric_weight(l3, alpha)
    return 0.5 * (w3 - l1 * (l1 + 1) + l2 * (l2 + 1)) / w3


def k_coef(l3: int, l4: int, l: int, alpha: float, printed: bool = False) -> float:
    """Curvature coefficient ``k^l_{l3 l4} = (l(l+1) - l3(l3+1) - l4(l4+1) - alpha^2) / (2 w_l)``.

    ``printed=True`` adds the stray leading ``1`` of the published formula,
    kept only for the discrepancy report.
    """
    num = l * (l + 1) - l3 * (l3 + 1) - l4 * (l4 + 1) - alpha * alpha
    if printed:
        num += 1.0
    return num / (2.0 * metric_weight(l, alpha))


def nabla_hat(x: HatVector, y: HatVector, ctx: MetricContext, table: StructureTable,
              lmax=_DEFAULT, strict: bool = False) -> HatVector:
    """Levi-Civita connection ``nabla_x y`` on the extension.

    Field part ``sum x_p y_q d^r_{l_p l_q} G^r_{pq} e_r - 1/2 (a_x T v + a_y T u)``,
    central part ``1/2 Omega(u, v)``.
    """
    _check_in_table(x, table)
    _check_in_table(y, table)
    out: dict = {}
    a = ctx.alpha
    for p, xv in x.coeffs.items():
        for q, yv in y.coeffs.items():
            for r, g in table.get(p, q):
                out[r] = out.get(r, 0) + xv * yv * d_coef(p.l, q.l, r.l, a) * g
    for scale, src in ((x.central, y.coeffs), (y.central, x.coeffs)):
        if scale != 0:
            for k, v in apply_t(src, ctx, table.sign).items():
                out[k] = out.get(k, 0) - 0.5 * scale * v
    return _finish(out, 0.5 * table.sign * cocycle_coeffs(x.coeffs, y.coeffs),
                   _resolve_lmax(lmax, table), strict)


def basis_vectors(lmax: int, central_values=(0.0,)) -> list[HatVector]:
    return [HatVector.basis(mode.l, mode.m, c) for mode in modes_up_to(lmax, 1)
            for c in central_values]
