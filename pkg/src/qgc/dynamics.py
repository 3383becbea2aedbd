"""Truncated Euler-Arnold dynamics on the extended algebra.

The geodesic equation ``d/dt (u, a) = -coad((u, a), (u, a))`` reads
``du/dt = -ad*_u u + a T u`` with ``a`` constant.  In stream-function form this
is the quasi-geostrophic equation ``d/dt (Lap f - alpha^2 f) + {f, Lap f - a mu} = 0``.
Modes above the table's ``lmax`` are dropped inside the right-hand side.
Time is nondimensional.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BlowUpError, DomainError
from .extension import NO_TRUNCATION, HatVector, MetricContext, coad_hat, metric
from .harmonics import ModeIndex, modes_up_to
from .parallel import pmap
from .structure import StructureTable, TradewindGenerator

SCHEMES = ("rk4", "euler")


@dataclass(frozen=True)
class FlowState:
    u: HatVector
    t: float
    ctx: MetricContext
    table: StructureTable

    def __post_init__(self):
        if self.u.lmax > self.table.lmax:
            raise DomainError(f"state reaches l={self.u.lmax} beyond table lmax={self.table.lmax}")
        if not self.u.is_real(1e-9):
            raise DomainError("flow state must be real")

    @property
    def a(self):
        return self.u.central

    def energy(self) -> float:
        return metric(self.u, self.u, self.ctx).real


def rhs(state: FlowState) -> HatVector:
    """Field derivative ``-coad(u, u)`` projected to ``l <= lmax``; central part zero.

    ``coad`` already carries the ``-a T u`` term, so no separate rotation term
    is added here.
    """
    d = coad_hat(state.u, state.u, state.ctx, state.table, lmax=NO_TRUNCATION)
    return (-1.0 * d).truncated(state.table.lmax)


class SpectralSystem:
    """Dense-vector form of :func:`rhs` for time stepping.

    Coefficients live in a flat array over ``modes_up_to(lmax)``.  The
    quadratic term is stored as a sparse list of ``(r, p, q, K)`` with
    ``K = (w_q / w_r) G^r_{qp}``.
    """

    def __init__(self, ctx: MetricContext, table: StructureTable):
        self.ctx = ctx
        self.table = table
        self.modes = modes_up_to(table.lmax)
        self.index = {m: i for i, m in enumerate(self.modes)}
        n = len(self.modes)
        self.weights = np.array([ctx.weight(m.l) for m in self.modes])
        self.partner = np.array([self.index[(m.l, -m.m)] for m in self.modes])
        self.parity = np.array([-1.0 if m.m % 2 else 1.0 for m in self.modes])
        t = np.zeros(n, dtype=complex)
        for i, m in enumerate(self.modes):
            if m.m:
                t[i] = -1j * table.sign * m.m / self.weights[i]
        self.tdiag = t
        self.l10 = self.index[(1, 0)]
        rs, ps, qs, ks = [], [], [], []
        for p in self.modes:
            for q in self.modes:
                wq = ctx.weight(q.l)
                for r, g in table.get(q, p):
                    if r.l > table.lmax:
                        continue
                    rs.append(self.index[r])
                    ps.append(self.index[p])
                    qs.append(self.index[q])
                    ks.append(wq / ctx.weight(r.l) * g)
        self.r_idx = np.array(rs, dtype=int)
        self.p_idx = np.array(ps, dtype=int)
        self.q_idx = np.array(qs, dtype=int)
        self.kvals = np.array(ks, dtype=complex)
        self.n = n

    def to_array(self, u: HatVector) -> np.ndarray:
        c = np.zeros(self.n, dtype=complex)
        for k, v in u.coeffs.items():
            c[self.index[k]] = v
        return c

    def to_vector(self, c: np.ndarray, central) -> HatVector:
        return HatVector({m: complex(v) for m, v in zip(self.modes, c) if v != 0}, central)

    def rhs(self, c: np.ndarray, a) -> np.ndarray:
        prod = self.kvals * c[self.p_idx] * c[self.q_idx]
        out = (np.bincount(self.r_idx, prod.real, self.n)
               + 1j * np.bincount(self.r_idx, prod.imag, self.n))
        return out + a * self.tdiag * c

    def energy(self, c: np.ndarray, a) -> float:
        return float(np.sum(self.weights * self.parity * c * c[self.partner]).real + (a * a).real)

    def enstrophy(self, c: np.ndarray, a) -> float:
        """Potential enstrophy ``int q^2`` with ``q = (Lap - alpha^2) f + a mu``."""
        q = -self.weights * c
        q[self.l10] += a * math.sqrt(4.0 * math.pi / 3.0)
        return float(np.sum(self.parity * q * q[self.partner]).real)

    def reality_residual(self, c: np.ndarray) -> float:
        return float(np.max(np.abs(c[self.partner] - self.parity * np.conj(c)), initial=0.0))


def _step(system: SpectralSystem, c, a, dt, scheme):
    f = system.rhs
    if scheme == "euler":
        return c + dt * f(c, a)
    k1 = f(c, a)
    k2 = f(c + 0.5 * dt * k1, a)
    k3 = f(c + 0.5 * dt * k2, a)
    k4 = f(c + dt * k3, a)
    return c + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


@dataclass
class Trajectory:
    """Recorded states and per-record diagnostics of one run."""

    system: SpectralSystem
    central: complex
    times: np.ndarray
    coeffs: np.ndarray
    energy: np.ndarray
    enstrophy: np.ndarray
    reality: np.ndarray
    max_abs: np.ndarray
    centrals: list = field(default_factory=list)

    def __len__(self):
        return len(self.times)

    def __getitem__(self, i) -> FlowState:
        u = self.system.to_vector(self.coeffs[i], self.centrals[i])
        return FlowState(u, float(self.times[i]), self.system.ctx, self.system.table)

    def rows(self):
        """``(t, E, a, enstrophy, max|c|)`` per record."""
        return [(float(t), float(e), float(np.real(a)), float(z), float(m))
                for t, e, a, z, m in zip(self.times, self.energy, self.centrals,
                                         self.enstrophy, self.max_abs)]

    def energy_drift(self) -> float:
        e0 = self.energy[0]
        return float(np.max(np.abs(self.energy - e0)) / abs(e0))


def integrate(state0: FlowState, dt: float, n_steps: int, scheme: str = "rk4",
              bound: float = 1e6, record_every: int = 1,
              system: SpectralSystem | None = None) -> Trajectory:
    """Fixed-step integration with invariant diagnostics.

    Raises :class:`BlowUpError` when a coefficient exceeds ``bound`` or stops
    being finite.  The central component is carried through untouched.
    """
    if not dt > 0:
        raise DomainError(f"dt must be positive, got {dt}")
    if n_steps < 0 or record_every < 1:
        raise DomainError("need n_steps >= 0 and record_every >= 1")
    if scheme not in SCHEMES:
        raise DomainError(f"unknown scheme {scheme!r}; choose from {SCHEMES}")
    system = system or SpectralSystem(state0.ctx, state0.table)
    a = state0.u.central
    c = system.to_array(state0.u)
    times, snaps, centrals = [], [], []

    def record(step, c):
        times.append(state0.t + step * dt)
        snaps.append(c.copy())
        centrals.append(a)

    record(0, c)
    for step in range(1, n_steps + 1):
        c = _step(system, c, a, dt, scheme)
        peak = np.max(np.abs(c), initial=0.0)
        if not np.isfinite(peak) or peak > bound:
            raise BlowUpError(f"coefficient magnitude {peak:.3e} exceeds bound {bound:g} "
                              f"at t={state0.t + step * dt:g}")
        if step % record_every == 0 or step == n_steps:
            record(step, c)
    coeffs = np.array(snaps)
    return Trajectory(
        system=system, central=a, times=np.array(times), coeffs=coeffs,
        energy=np.array([system.energy(x, a) for x in coeffs]),
        enstrophy=np.array([system.enstrophy(x, a) for x in coeffs]),
        reality=np.array([system.reality_residual(x) for x in coeffs]),
        max_abs=np.max(np.abs(coeffs), axis=1, initial=0.0),
        centrals=centrals,
    )


def metric_distance(x: HatVector, y: HatVector, ctx: MetricContext) -> float:
    d = x - y
    return math.sqrt(max(metric(d, d, ctx).real, 0.0))


def twin_divergence(state0: FlowState, eps: float, dt: float, n_steps: int,
                    direction: HatVector | None = None, seed: int = 0,
                    record_every: int = 1, bound: float = 1e6) -> np.ndarray:
    """Metric separation of a base run and a perturbed twin.

    The twin starts at ``u + eps * d / |d|`` with ``d`` either ``direction`` or
    a seeded random real field.  Returns rows ``(t, log separation)``; an
    exactly zero separation gives ``-inf``.
    """
    if eps < 0:
        raise DomainError("perturbation size must be >= 0")
    ctx, table = state0.ctx, state0.table
    if direction is None:
        direction = HatVector.random_real(table.lmax, np.random.default_rng(seed), central=0.0)
    norm = math.sqrt(metric(direction, direction, ctx).real)
    if norm == 0:
        raise DomainError("perturbation direction has zero norm")
    twin = FlowState(state0.u + direction * (eps / norm), state0.t, ctx, table)
    system = SpectralSystem(ctx, table)
    base_run, twin_run = pmap(
        lambda s: integrate(s, dt, n_steps, bound=bound, record_every=record_every, system=system),
        [state0, twin])
    out = np.empty((len(base_run), 2))
    out[:, 0] = base_run.times
    for i in range(len(base_run)):
        diff = base_run.coeffs[i] - twin_run.coeffs[i]
        sep2 = float(np.sum(system.weights * np.abs(diff) ** 2))
        out[i, 1] = 0.5 * math.log(sep2) if sep2 > 0 else -math.inf
    return out


def zonal_state(nu: float, a: float, ctx: MetricContext, table: StructureTable) -> FlowState:
    """Rigid-rotation state ``nu sqrt(4pi/3) e_10`` with central part ``a``."""
    return FlowState(HatVector({ModeIndex(1, 0): nu * math.sqrt(4.0 * math.pi / 3.0)}, a),
                     0.0, ctx, table)


def tradewind_state(a: float, ctx: MetricContext, table: StructureTable) -> FlowState:
    return FlowState(HatVector(TradewindGenerator().spectrum, a), 0.0, ctx, table)
