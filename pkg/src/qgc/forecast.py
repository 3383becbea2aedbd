"""Predictability arithmetic built on the tradewind curvature.

A mean curvature ``kappa_av = -15 beta / (8 pi (1 + a^2))`` sets the e-folding
path length ``S = sqrt(-1/kappa_av)``.  One orbit of the fastest tradewind
particles (latitude 45 degrees) amplifies an initial error by
``exp(2 sqrt(2) pi sqrt(beta / (1 + a^2)))``.  With a mean wind speed the orbit
gets a duration in hours, and errors after ``n`` thirty-day months follow.

Two conventions for the monthly exponent are reported: the rounded
``10 n sqrt(beta/(1+a^2))`` and the exact chain, whose prefactor
``(720/400) 4 pi log10(e) = 9.8235...`` the rounded form replaces by 10.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .curvature import tradewind_limit
from .errors import DomainError

HOURS_PER_MONTH = 30 * 24
EARTH_CIRCUMFERENCE_KM = 40000.0
TRADEWIND_SPEED_SQ_MAX = 15.0 / (32.0 * math.pi)


@dataclass(frozen=True)
class ForecastParams:
    a: float = 0.0
    beta_luk: float = 0.25
    months: float = 0.0
    wind_kmh: float = 100.0
    orbit_km: float = EARTH_CIRCUMFERENCE_KM / math.sqrt(2.0)
    orbit_sphere: float = math.sqrt(2.0) * math.pi
    alpha: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.beta_luk < 1.0:
            raise DomainError(f"beta_luk must lie in (0, 1), got {self.beta_luk}")
        if not self.months >= 0:
            raise DomainError(f"months must be >= 0, got {self.months}")
        if not (self.wind_kmh > 0 and self.orbit_km > 0 and self.orbit_sphere > 0):
            raise DomainError("wind speed and orbit lengths must be positive")
        if not (math.isfinite(self.a) and math.isfinite(self.alpha) and self.alpha >= 0):
            raise DomainError("a must be finite and alpha finite and >= 0")

    @property
    def ratio(self) -> float:
        """``sqrt(beta / (1 + a^2))``, the quantity every estimate scales with.

        For ``alpha > 0`` the denominator becomes ``3/8 alpha^2 + 1 + a^2``.
        """
        return math.sqrt(self.beta_luk / (0.375 * self.alpha ** 2 + 1.0 + self.a * self.a))


def mean_curvature(p: ForecastParams) -> float:
    """``-15 beta / (8 pi (1 + a^2))``.

    With ``alpha > 0`` the large-``l0`` tradewind limit including the Froude
    term is scaled by ``beta`` instead (an extension, not a printed formula).
    """
    if p.alpha:
        return p.beta_luk * tradewind_limit(p.a, p.alpha)
    return -15.0 * p.beta_luk / (8.0 * math.pi * (1.0 + p.a * p.a))


def characteristic_length(p: ForecastParams) -> float:
    return math.sqrt(-1.0 / mean_curvature(p))


def orbit_path(p: ForecastParams) -> float:
    """Nondimensional orbit parameter ``s = 2 sqrt(2) pi sqrt(beta/(1+a^2)) S``.

    ``sqrt(2) pi`` is the orbit length at 45 degrees in sphere units.
    """
    return 2.0 * p.orbit_sphere * p.ratio * characteristic_length(p)


def per_orbit_factor(p: ForecastParams) -> float:
    """``exp(2 sqrt(2) pi sqrt(beta / (1 + a^2)))``."""
    return math.exp(2.0 * p.orbit_sphere * p.ratio)


def orbit_hours(p: ForecastParams) -> float:
    return p.orbit_km / p.wind_kmh


@dataclass(frozen=True)
class Growth:
    """Base-10 exponent of the error factor after ``months``."""

    rounded: float
    exact: float


def _exact_prefactor(p: ForecastParams) -> float:
    # natural exponent per month: orbits per month times the per-orbit exponent
    orbits = HOURS_PER_MONTH / orbit_hours(p)
    return orbits * 2.0 * p.orbit_sphere * math.log10(math.e)


def growth_after_months(n: float, p: ForecastParams) -> Growth:
    if not n >= 0:
        raise DomainError(f"months must be >= 0, got {n}")
    return Growth(10.0 * n * p.ratio, n * _exact_prefactor(p) * p.ratio)


def months_to_exponent(target: float, p: ForecastParams, exact: bool = False) -> float:
    """Months until the error grows by ``10**target``."""
    if not target >= 0:
        raise DomainError(f"target exponent must be >= 0, got {target}")
    rate = _exact_prefactor(p) if exact else 10.0
    return target / (rate * p.ratio)


def tradewind_speed_sq(mu):
    """Squared speed ``(15 / 8 pi) mu^2 (1 - mu^2)`` of the tradewind field."""
    return 15.0 / (8.0 * math.pi) * mu * mu * (1.0 - mu * mu)


def fastest_latitude() -> tuple:
    """``(mu, speed^2)`` at the positive maximiser ``mu = 1/sqrt(2)``."""
    mu = 1.0 / math.sqrt(2.0)
    return mu, tradewind_speed_sq(mu)


@dataclass(frozen=True)
class ForecastReport:
    kappa_av: float
    S: float
    s: float
    per_orbit_factor: float
    orbit_hours: float
    log10_growth: float
    log10_growth_exact: float
    months_to_1e5: float
    months_to_1e5_exact: float
    alpha: float = 0.0

    def as_dict(self) -> dict:
        return asdict(self)


def report(p: ForecastParams) -> ForecastReport:
    kappa = mean_curvature(p)
    g = growth_after_months(p.months, p)
    if kappa >= 0:
        raise DomainError("mean curvature must be negative")
    return ForecastReport(
        kappa_av=kappa, S=characteristic_length(p), s=orbit_path(p),
        per_orbit_factor=per_orbit_factor(p), orbit_hours=orbit_hours(p),
        log10_growth=g.rounded, log10_growth_exact=g.exact,
        months_to_1e5=months_to_exponent(5.0, p),
        months_to_1e5_exact=months_to_exponent(5.0, p, exact=True),
        alpha=p.alpha,
    )
