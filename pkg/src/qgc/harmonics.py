"""Complex spherical harmonics on the (lambda, mu) chart of the unit sphere.

Coordinates are the longitude ``lambda`` in [0, 2 pi) and ``mu = cos(theta)``
in [-1, 1]; the area element is ``d lambda d mu``.  Harmonics use the
Condon-Shortley convention

    Y_lm(lambda, mu) = C_l^m P_l^|m|(mu) exp(i m lambda),

with ``C_l^m = s_m sqrt((2l+1)/(4 pi) (l-|m|)!/(l+|m|)!)``, ``s_m = (-1)^m``
for ``m > 0`` and ``1`` otherwise.  This is the choice for which
``conj(Y_lm) = (-1)^m Y_l,-m`` and the bilinear pairing
``int Y_l1m1 Y_l2m2 = (-1)^m1 delta(l1,l2) delta(m1,-m2)`` hold.

Coefficient maps (``dict[ModeIndex, complex]``) are the sparse exchange format
between modules; dense arrays indexed ``[l, m + lmax]`` are used internally by
the quadrature transforms.
"""

from __future__ import annotations

import math
from collections import namedtuple
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping

import numpy as np

from .errors import DomainError, GridTooSmallError

__all__ = [
    "ModeIndex",
    "SphereGrid",
    "assoc_legendre",
    "normalized_legendre_table",
    "ylm_eval",
    "pair",
    "project",
    "analysis",
    "synthesis",
    "sample_coeffs",
    "poisson_bracket_grid",
    "laplacian_grid",
    "modes_up_to",
]


class ModeIndex(namedtuple("ModeIndex", ["l", "m"])):
    """Spherical-harmonic label ``(l, m)`` with ``|m| <= l``.

    Being a tuple, it orders lexicographically and compares/hashes equal to a
    plain ``(l, m)`` tuple, so either can key a coefficient map.
    """

    __slots__ = ()

    def __new__(cls, l, m):
        l, m = int(l), int(m)
        if l < 0 or abs(m) > l:
            raise DomainError(f"invalid mode (l={l}, m={m}): need 0 <= |m| <= l")
        return super().__new__(cls, l, m)

    def __repr__(self):
        return f"({self.l},{self.m})"


def modes_up_to(lmax: int, lmin: int = 0) -> list[ModeIndex]:
    """All modes with ``lmin <= l <= lmax`` in (l, m) order."""
    return [ModeIndex(l, m) for l in range(lmin, lmax + 1) for m in range(-l, l + 1)]


def _cs_phase(m: int) -> int:
    return -1 if (m > 0 and m % 2) else 1


def _norm(l: int, m: int) -> float:
    m = abs(m)
    return math.sqrt((2 * l + 1) / (4 * math.pi)
                     * math.exp(math.lgamma(l - m + 1) - math.lgamma(l + m + 1)))


def normalized_legendre_table(lmax: int, mu) -> np.ndarray:
    """Orthonormalised associated Legendre functions for ``0 <= m <= l <= lmax``.

    Returns ``lam`` of shape ``(lmax+1, lmax+1, len(mu))`` with
    ``lam[l, m] = sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!) P_l^m(mu)`` (no
    Condon-Shortley phase) and zeros for ``m > l``.  Uses the sectoral seed
    followed by the upward three-term recurrence in ``l``.
    """
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    s = np.sqrt(np.clip(1.0 - mu * mu, 0.0, None))
    lam = np.zeros((lmax + 1, lmax + 1, mu.size))
    lam[0, 0] = 1.0 / math.sqrt(4.0 * math.pi)
    for m in range(1, lmax + 1):
        lam[m, m] = math.sqrt((2 * m + 1) / (2 * m)) * s * lam[m - 1, m - 1]
    for m in range(0, lmax):
        lam[m + 1, m] = math.sqrt(2 * m + 3) * mu * lam[m, m]
        for l in range(m + 2, lmax + 1):
            a = math.sqrt((4 * l * l - 1) / (l * l - m * m))
            b = math.sqrt(((l - 1) ** 2 - m * m) / (4 * (l - 1) ** 2 - 1))
            lam[l, m] = a * (mu * lam[l - 1, m] - b * lam[l - 2, m])
    return lam


def _legendre_derivatives(lam: np.ndarray, mu: np.ndarray):
    """First and second mu-derivatives of a normalised table at interior nodes."""
    lmax = lam.shape[0] - 1
    one_minus = 1.0 - mu * mu
    d1 = np.zeros_like(lam)
    d2 = np.zeros_like(lam)
    for m in range(lmax + 1):
        for l in range(m, lmax + 1):
            lower = 0.0
            dlower = 0.0
            if l - 1 >= m:
                c = math.sqrt((2 * l + 1) * (l * l - m * m) / (2 * l - 1))
                lower = c * lam[l - 1, m]
                dlower = c * d1[l - 1, m]
            d1[l, m] = (lower - l * mu * lam[l, m]) / one_minus
            d2[l, m] = (dlower - l * lam[l, m] - (l - 2) * mu * d1[l, m]) / one_minus
    return d1, d2


def assoc_legendre(l: int, m: int, mu):
    """Associated Legendre function ``P_l^m(mu)`` without Condon-Shortley phase.

    ``P_l^m(mu) = (1-mu^2)^(m/2) / (2^l l!) d^(l+m)/dmu^(l+m) (mu^2-1)^l``,
    evaluated through the normalised recurrence rather than by
    differentiation.  Accepts scalar or array ``mu``.
    """
    if not 0 <= m <= l:
        raise DomainError(f"assoc_legendre needs 0 <= m <= l, got l={l}, m={m}")
    arr = np.asarray(mu, dtype=float)
    if np.any(np.abs(arr) > 1.0):
        raise DomainError("assoc_legendre needs |mu| <= 1")
    val = normalized_legendre_table(l, arr.ravel())[l, m] / _norm(l, m)
    if arr.ndim == 0:
        return float(val[0])
    return val.reshape(arr.shape)


def ylm_eval(mode, lam, mu):
    """Evaluate ``Y_lm(lambda, mu)``; broadcasts over array arguments."""
    l, m = ModeIndex(*mode)
    mu_arr = np.asarray(mu, dtype=float)
    if np.any(np.abs(mu_arr) > 1.0):
        raise DomainError("ylm_eval needs |mu| <= 1")
    lam_arr = np.asarray(lam, dtype=float)
    shape = np.broadcast(lam_arr, mu_arr).shape
    mu_b = np.broadcast_to(mu_arr, shape).ravel()
    lam_b = np.broadcast_to(lam_arr, shape).ravel()
    table = normalized_legendre_table(l, mu_b)
    out = _cs_phase(m) * table[l, abs(m)] * np.exp(1j * m * lam_b)
    if not shape:
        return complex(out[0])
    return out.reshape(shape)


def pair(f_coeffs: Mapping, g_coeffs: Mapping) -> complex:
    """Bilinear (non-conjugated) pairing ``sum (-1)^m f_{l,m} g_{l,-m}``.

    This is ``int f g d lambda d mu`` for the represented functions; it is not
    the Hermitian L2 product.
    """
    total = 0j
    for (l, m), fv in f_coeffs.items():
        gv = g_coeffs.get((l, -m))
        if gv is not None:
            total += (-1) ** (m % 2) * fv * gv
    return total


@dataclass(frozen=True)
class SphereGrid:
    """Gauss-Legendre nodes in mu times uniform nodes in lambda.

    Products of two functions of degree <= ``band`` are integrated exactly,
    where ``band = min(n_mu - 1, (n_lambda - 1) // 2)``.
    """

    n_mu: int
    n_lambda: int

    def __post_init__(self):
        if self.n_mu < 1 or self.n_lambda < 1:
            raise DomainError("grid sizes must be positive")

    @classmethod
    def for_lmax(cls, lmax: int) -> "SphereGrid":
        """Grid on which brackets of degree-``lmax`` inputs project exactly."""
        return cls(2 * lmax + 2, 4 * lmax + 4)

    @property
    def band(self) -> int:
        return min(self.n_mu - 1, (self.n_lambda - 1) // 2)

    @cached_property
    def _gauss(self):
        return np.polynomial.legendre.leggauss(self.n_mu)

    @property
    def mu(self) -> np.ndarray:
        return self._gauss[0]

    @property
    def weights(self) -> np.ndarray:
        return self._gauss[1]

    @cached_property
    def lam(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.n_lambda) / self.n_lambda

    @cached_property
    def legendre(self) -> np.ndarray:
        return normalized_legendre_table(self.band, self.mu)

    @cached_property
    def legendre_derivs(self):
        return _legendre_derivatives(self.legendre, self.mu)

    def mesh(self):
        """``(mu, lambda)`` arrays of shape ``(n_mu, n_lambda)``."""
        return np.meshgrid(self.mu, self.lam, indexing="ij")

    def require_band(self, degree: int, what: str = "operation"):
        if degree > self.band:
            raise GridTooSmallError(
                f"{what} needs exact quadrature to degree {degree}, grid "
                f"(n_mu={self.n_mu}, n_lambda={self.n_lambda}) resolves {self.band}")


def _fourier(samples: np.ndarray, grid: SphereGrid) -> np.ndarray:
    # F[j, k] = (2 pi / n) sum_k f e^{-i m lambda_k}, with m = k mod n
    return np.fft.fft(samples, axis=1) * (2.0 * np.pi / grid.n_lambda)


def analysis(samples, grid: SphereGrid, lmax: int | None = None) -> np.ndarray:
    """Dense coefficients ``c[l, m + lmax]`` of grid samples.

    ``c_lm = int f conj(Y_lm)``, which for band-limited ``f`` gives
    ``f = sum c_lm Y_lm``.
    """
    lmax = grid.band if lmax is None else lmax
    grid.require_band(lmax, "projection")
    samples = np.asarray(samples)
    if samples.shape != (grid.n_mu, grid.n_lambda):
        raise DomainError(f"samples must have shape {(grid.n_mu, grid.n_lambda)}")
    four = _fourier(samples, grid)
    wl = grid.legendre[: lmax + 1, : lmax + 1] * grid.weights
    out = np.zeros((lmax + 1, 2 * lmax + 1), dtype=complex)
    for m in range(-lmax, lmax + 1):
        fm = four[:, m % grid.n_lambda]
        out[abs(m):, m + lmax] = _cs_phase(m) * (wl[abs(m):, abs(m)] @ fm)
    return out


def _synthesize(coeffs: np.ndarray, grid: SphereGrid, table: np.ndarray) -> np.ndarray:
    lmax = coeffs.shape[0] - 1
    grid.require_band(lmax, "synthesis")
    spec = np.zeros((grid.n_mu, grid.n_lambda), dtype=complex)
    for m in range(-lmax, lmax + 1):
        col = coeffs[abs(m):, m + lmax]
        if not np.any(col):
            continue
        spec[:, m % grid.n_lambda] += _cs_phase(m) * (col @ table[abs(m): lmax + 1, abs(m)])
    return np.fft.ifft(spec, axis=1) * grid.n_lambda


def synthesis(coeffs: np.ndarray, grid: SphereGrid) -> np.ndarray:
    """Grid samples of ``sum c_lm Y_lm`` from dense coefficients."""
    return _synthesize(coeffs, grid, grid.legendre)


def dense_from_map(coeffs: Mapping, lmax: int) -> np.ndarray:
    out = np.zeros((lmax + 1, 2 * lmax + 1), dtype=complex)
    for (l, m), v in coeffs.items():
        if l > lmax:
            raise DomainError(f"mode ({l},{m}) exceeds lmax={lmax}")
        out[l, m + lmax] += v
    return out


def map_from_dense(dense: np.ndarray, tol: float = 0.0) -> dict:
    lmax = dense.shape[0] - 1
    out = {}
    for l in range(lmax + 1):
        for m in range(-l, l + 1):
            v = dense[l, m + lmax]
            if abs(v) > tol:
                out[ModeIndex(l, m)] = complex(v)
    return out


def sample_coeffs(coeffs: Mapping, grid: SphereGrid) -> np.ndarray:
    """Grid samples of the function with sparse coefficient map ``coeffs``."""
    lmax = max((l for l, _ in coeffs), default=0)
    return synthesis(dense_from_map(coeffs, lmax), grid)


def project(samples, mode, grid: SphereGrid) -> complex:
    """Coefficient of ``Y_lm`` in the band-limited function tabulated by ``samples``."""
    l, m = ModeIndex(*mode)
    if l > grid.n_mu - 1 or 2 * abs(m) >= grid.n_lambda:
        raise GridTooSmallError(f"grid cannot project onto mode ({l},{m})")
    four = _fourier(np.asarray(samples), grid)
    table = grid.legendre if l <= grid.band else normalized_legendre_table(l, grid.mu)
    return complex(_cs_phase(m) * np.sum(grid.weights * table[l, abs(m)]
                                         * four[:, m % grid.n_lambda]))


def _band_limited_expansion(samples, grid: SphereGrid, rtol: float = 1e-9):
    """Expand samples and verify they are resolved by the grid."""
    coeffs = analysis(samples, grid)
    recon = synthesis(coeffs, grid)
    scale = max(np.max(np.abs(samples)), 1.0)
    if np.max(np.abs(recon - samples)) > rtol * scale:
        raise GridTooSmallError("samples are not band-limited on this grid")
    amp = np.abs(coeffs).max(axis=1)
    nz = np.nonzero(amp > 1e-10 * max(amp.max(), 1e-300))[0]
    degree = int(nz[-1]) if nz.size else 0
    return coeffs, degree


def _d_lambda(samples, grid: SphereGrid) -> np.ndarray:
    n = grid.n_lambda
    k = np.fft.fftfreq(n, d=1.0 / n)
    if n % 2 == 0:
        k[n // 2] = 0.0
    return np.fft.ifft(1j * k * np.fft.fft(samples, axis=1), axis=1)


def _d_mu(coeffs, grid: SphereGrid, order: int = 1) -> np.ndarray:
    table = grid.legendre_derivs[order - 1]
    return _synthesize(coeffs, grid, table)


def poisson_bracket_grid(f_samples, g_samples, grid: SphereGrid) -> np.ndarray:
    """Pointwise ``{f, g} = f_lambda g_mu - f_mu g_lambda`` on the grid.

    The lambda-derivative is spectral (FFT); the mu-derivative differentiates
    the harmonic expansion of each input, which is exact for band-limited
    samples.  Raises ``GridTooSmallError`` if an input is not resolved or the
    bracket (degree ``deg f + deg g - 1``) exceeds the grid band.
    """
    f_samples = np.asarray(f_samples, dtype=complex)
    g_samples = np.asarray(g_samples, dtype=complex)
    cf, deg_f = _band_limited_expansion(f_samples, grid)
    cg, deg_g = _band_limited_expansion(g_samples, grid)
    grid.require_band(deg_f + deg_g - 1, "Poisson bracket")
    f_lam = _d_lambda(f_samples, grid)
    g_lam = _d_lambda(g_samples, grid)
    return f_lam * _d_mu(cg, grid) - _d_mu(cf, grid) * g_lam


def laplacian_grid(samples, grid: SphereGrid) -> np.ndarray:
    """Spherical Laplacian ``d_mu((1-mu^2) d_mu f) + f_lambda_lambda / (1-mu^2)``."""
    samples = np.asarray(samples, dtype=complex)
    coeffs, _ = _band_limited_expansion(samples, grid)
    mu = grid.mu[:, None]
    f_ll = _d_lambda(_d_lambda(samples, grid), grid)
    return ((1 - mu * mu) * _d_mu(coeffs, grid, 2) - 2 * mu * _d_mu(coeffs, grid, 1)
            + f_ll / (1 - mu * mu))
