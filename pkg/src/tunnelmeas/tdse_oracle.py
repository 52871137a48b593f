"""Crank-Nicolson propagator for the 1D TDSE with U(x) + U(t).

This is an independent numerical reference. It shares only the input types
with the analytic model. The perturbation acts inside the barrier only
(``region="barrier"``). ``region="global"`` applies it everywhere, which
must leave every density unchanged.

Barrier edges need not fall on grid nodes. Each node carries the
cell-averaged potential, so the discrete barrier has the right area.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.linalg import solve_banded

from .core_model import BarrierSpec, PerturbationSpec, perturbation_at
from .errors import DomainError, GridTooSmall, NumericalBlowup, PrematureMeasurement, ValidationError

MIN_POINTS = 256


@dataclass(frozen=True)
class GridSpec:
    x_min: float
    x_max: float
    n_points: int
    dt: float

    def __post_init__(self):
        if not self.x_min < 0 < self.x_max:
            raise ValidationError("oracle.x_min/x_max", "grid must bracket x = 0")
        if self.n_points < MIN_POINTS:
            raise ValidationError("oracle.n_points", f"need at least {MIN_POINTS} points")
        if not self.dt > 0:
            raise ValidationError("oracle.dt", "time step must be positive")

    @classmethod
    def aligned(cls, L: float, pad_left: float, pad_right: float, dx: float, dt: float) -> "GridSpec":
        """Grid whose nodes include x = 0 and x = L exactly."""
        n_bar = max(1, round(L / dx))
        h = L / n_bar
        n_left = math.ceil(pad_left / h)
        n_right = math.ceil(pad_right / h)
        return cls(-n_left * h, L + n_right * h, n_left + n_bar + n_right + 1, dt)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)


@dataclass(frozen=True)
class WavePacket:
    x0: float
    sigma: float
    k0: float

    def __post_init__(self):
        if not self.x0 < 0:
            raise ValidationError("oracle.x0", "packet must start left of the barrier")
        if not self.sigma > 0:
            raise ValidationError("oracle.sigma", "must be positive")
        if not self.k0 > 0:
            raise ValidationError("oracle.k0", "must be positive")

    def energy(self, mass: float = 1.0) -> float:
        return self.k0 ** 2 / (2.0 * mass)

    def energy_spread(self, mass: float = 1.0) -> float:
        """sigma_E = k0 sigma_k / m with sigma_k = 1/(2 sigma)."""
        return self.k0 / (2.0 * self.sigma) / mass


@dataclass
class PropagationResult:
    psi_final: np.ndarray
    norm_history: List[float]
    transmission: float
    reflection: float
    remainder: float
    time: float
    snapshots: List[Tuple[int, np.ndarray]] = field(default_factory=list)

    @property
    def norm_drift(self) -> float:
        return max(abs(n - self.norm_history[0]) for n in self.norm_history)


def discrete_norm(psi: np.ndarray, dx: float) -> float:
    return float(np.sum(np.abs(psi) ** 2) * dx)


def init_packet(grid: GridSpec, wp: WavePacket) -> np.ndarray:
    """Gaussian ``exp(-(x-x0)^2/(4 sigma^2) + i k0 x)``, discretely normalised."""
    x = grid.x
    envelope = np.exp(-((x - wp.x0) ** 2) / (4.0 * wp.sigma ** 2))
    if max(envelope[0], envelope[-1]) >= 1e-12:
        raise GridTooSmall(
            f"packet amplitude at grid edge is {max(envelope[0], envelope[-1]):.2e} of peak; widen the grid"
        )
    psi = envelope * np.exp(1j * wp.k0 * x)
    return psi / math.sqrt(discrete_norm(psi, grid.dx))


def cell_weights(grid: GridSpec, lo: float, hi: float) -> np.ndarray:
    """Fraction of each node's cell ``[x - dx/2, x + dx/2]`` inside ``[lo, hi]``."""
    x = grid.x
    h = grid.dx
    left = np.maximum(x - 0.5 * h, lo)
    right = np.minimum(x + 0.5 * h, hi)
    return np.clip(right - left, 0.0, None) / h


def static_potential(grid: GridSpec, barrier: BarrierSpec) -> np.ndarray:
    V = np.zeros(grid.n_points)
    for a, b, U in barrier.segments:
        V += U * cell_weights(grid, a, b)
    return V


def region_probability(x: np.ndarray, dens: np.ndarray, lo: float, hi: float) -> float:
    """Trapezoid integral of ``dens`` over ``[lo, hi]`` (exact for the
    piecewise-linear interpolant, so adjacent regions sum to the whole)."""
    lo = max(lo, x[0])
    hi = min(hi, x[-1])
    if hi <= lo:
        return 0.0
    inside = (x > lo) & (x < hi)
    xs = np.concatenate(([lo], x[inside], [hi]))
    ys = np.concatenate(([np.interp(lo, x, dens)], dens[inside], [np.interp(hi, x, dens)]))
    return float(np.sum(0.5 * (ys[1:] + ys[:-1]) * np.diff(xs)))


def propagate(
    psi: np.ndarray,
    grid: GridSpec,
    barrier: BarrierSpec,
    pert: Optional[PerturbationSpec] = None,
    steps: int = 1000,
    mass: float = 1.0,
    region: str = "barrier",
    t_start: float = 0.0,
    direction: int = 1,
    snapshot_every: Optional[int] = None,
) -> PropagationResult:
    """Advance ``psi`` by ``steps`` Crank-Nicolson steps.

    ``(1 + i dt/2 H) psi_new = (1 - i dt/2 H) psi`` with the 3-point
    Laplacian, reflecting walls beyond the grid ends, and U(t) sampled at
    the step midpoint. ``direction=-1`` runs the same scheme with ``-dt``.
    """
    L = barrier.length
    if not L < grid.x_max:
        raise ValidationError("oracle.x_max", f"grid must extend beyond the barrier end {L}")
    if direction not in (1, -1):
        raise DomainError("direction must be +1 or -1")
    if region not in ("barrier", "global"):
        raise DomainError(f"unknown perturbation region {region!r}")
    n = grid.n_points
    h = grid.dx
    dt = direction * grid.dt
    x = grid.x
    V_static = static_potential(grid, barrier)
    weights = cell_weights(grid, 0.0, L) if region == "barrier" else np.ones(n)
    time_dependent = pert is not None and pert.amplitude != 0.0

    kin = 1.0 / (2.0 * mass * h * h)
    off = -kin * np.ones(n - 1)
    a_off = 0.5j * dt * off
    ab = np.zeros((3, n), dtype=complex)
    ab[0, 1:] = a_off
    ab[2, :-1] = a_off

    psi = np.asarray(psi, dtype=complex).copy()
    norms = [discrete_norm(psi, h)]
    snapshots = []
    if snapshot_every:
        snapshots.append((0, np.abs(psi) ** 2))
    t = t_start
    for step in range(1, steps + 1):
        V = V_static
        if time_dependent:
            t_mid = t + 0.5 * dt
            # backward runs may dip below t = 0; the envelope is evaluated at |t|
            V = V_static + perturbation_at(pert, abs(t_mid)) * weights
        diag = 2.0 * kin + V
        ab[1] = 1.0 + 0.5j * dt * diag
        rhs = (1.0 - 0.5j * dt * diag) * psi
        rhs[1:] -= a_off * psi[:-1]
        rhs[:-1] -= a_off * psi[1:]
        psi = solve_banded((1, 1), ab, rhs, overwrite_b=True, check_finite=False)
        t += dt
        nrm = discrete_norm(psi, h)
        if not math.isfinite(nrm):
            raise NumericalBlowup(step)
        norms.append(nrm)
        if snapshot_every and step % snapshot_every == 0:
            snapshots.append((step, np.abs(psi) ** 2))
    dens = np.abs(psi) ** 2
    return PropagationResult(
        psi_final=psi,
        norm_history=norms,
        transmission=region_probability(x, dens, L, x[-1]),
        reflection=region_probability(x, dens, x[0], 0.0),
        remainder=region_probability(x, dens, 0.0, L),
        time=t,
        snapshots=snapshots,
    )


def transmission_probability(psi: np.ndarray, grid: GridSpec, L: float) -> float:
    """Probability beyond the barrier, refusing to answer while more than
    1% of the norm is still inside it."""
    x = grid.x
    dens = np.abs(psi) ** 2
    total = region_probability(x, dens, x[0], x[-1])
    inside = region_probability(x, dens, 0.0, L)
    if total > 0 and inside >= 0.01 * total:
        raise PrematureMeasurement(f"{inside / total:.2%} of the norm is still inside the barrier")
    return region_probability(x, dens, L, x[-1])
