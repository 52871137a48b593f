"""Tunnelling-time estimators.

* :func:`stop_time_exact` -- first time the in-barrier density gradient
  vanishes, ``(2/omega0) arcsin(m omega0 / (4 hbar chi^2))``.
* :func:`stop_time_simplified` -- its small-argument limit
  ``hbar / (4 (U0 - E)) = m / (2 hbar chi^2)``.
* :func:`traversal_time_transfer_matrix` -- ``(1/|alpha|) int sqrt(m/dE(x)) dx``.
* :func:`measured_time_bound` -- ``hbar / (2 (E_inc - E_meas))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .core_model import HBAR, BarrierSpec, EnergyPair, Particle, PerturbationSpec
from .coupling import CouplingSolution, solve_coupling
from .errors import DomainError, InvalidDispersion, InvalidMeasurement, NoPerturbation, NotEvanescent
from .numerics import adaptive_quadrature, endpoint_singular_quadrature


@dataclass(frozen=True)
class TunnellingTimes:
    tau_exact: Optional[float]
    tau_simplified: float
    tau_transfer: float
    tau_measured_bound: Optional[float] = None


@dataclass(frozen=True)
class DispersionProfile:
    """Energy deficit ``dE(x) = E_inc - E(x)`` along the barrier.

    ``barrier_default`` uses ``U(x) - E_inc``; ``user_table`` interpolates
    ``(x, dE)`` pairs linearly; ``function`` wraps a callable and may vanish
    at the barrier edges (integrable 1/sqrt singularity).
    """

    kind: str = "barrier_default"
    table: Optional[Tuple[Tuple[float, float], ...]] = None
    function: Optional[Callable[[float], float]] = None

    def __post_init__(self):
        if self.kind == "user_table":
            if not self.table or len(self.table) < 2:
                raise InvalidDispersion("user_table needs at least two (x, dE) pairs")
            xs = [float(x) for x, _ in self.table]
            if any(b <= a for a, b in zip(xs, xs[1:])):
                raise InvalidDispersion("table x values must be strictly increasing")
            if any(not float(d) > 0 for _, d in self.table):
                raise InvalidDispersion("table dE values must be positive")
            object.__setattr__(self, "table", tuple((float(x), float(d)) for x, d in self.table))
        elif self.kind == "function":
            if self.function is None:
                raise InvalidDispersion("function kind needs a callable")
        elif self.kind != "barrier_default":
            raise InvalidDispersion(f"unknown dispersion kind {self.kind!r}")

    @classmethod
    def from_table(cls, pairs: Sequence[Tuple[float, float]]) -> "DispersionProfile":
        return cls("user_table", table=tuple(pairs))

    @classmethod
    def from_function(cls, fn: Callable[[float], float]) -> "DispersionProfile":
        return cls("function", function=fn)


def stop_time_exact(omega0: float, chi_abs: float, m: float) -> Optional[float]:
    """Returns ``None`` when the arcsine argument exceeds 1: the density
    gradient never vanishes in that regime."""
    if omega0 == 0:
        raise NoPerturbation("omega0 = 0: no measurement interaction, stop time undefined")
    if not (chi_abs > 0 and m > 0):
        raise DomainError("chi_abs and m must be positive")
    z = m * omega0 / (4.0 * HBAR * chi_abs ** 2)
    if abs(z) > 1.0:
        return None
    return 2.0 / omega0 * math.asin(z)


def stop_time_simplified(p: Particle, U0: float) -> float:
    if not U0 > p.energy:
        raise NotEvanescent(f"U0 = {U0} does not exceed E = {p.energy}")
    return HBAR / (4.0 * (U0 - p.energy))


def stop_time_simplified_kappa(chi_abs: float, m: float) -> float:
    """Same quantity written through the decay constant, ``m/(2 hbar chi^2)``."""
    return m / (2.0 * HBAR * chi_abs ** 2)


def _check_dispersion_positive(fn, a, b, n=1001):
    xs = np.linspace(a, b, n)[1:-1]
    vals = np.array([fn(float(x)) for x in xs])
    if not np.all(vals > 0):
        bad = xs[np.argmax(~(vals > 0))]
        raise InvalidDispersion(f"energy deficit not positive at x = {bad:.6g}")


def traversal_time_transfer_matrix(
    alpha_mag: float,
    barrier: BarrierSpec,
    E_inc: float,
    disp: DispersionProfile = DispersionProfile(),
    mass: float = 1.0,
    rel_tol: float = 1e-12,
) -> float:
    if not 0 < alpha_mag <= 1:
        raise DomainError(f"|alpha| = {alpha_mag} must lie in (0, 1]")
    L = barrier.length
    if disp.kind == "barrier_default":
        total = 0.0
        for a, b, U in barrier.segments:
            dE = U - E_inc
            if not dE > 0:
                raise InvalidDispersion(f"U = {U} does not exceed E_inc = {E_inc} on [{a}, {b}]")
            total += (b - a) * math.sqrt(mass / dE)
        return total / alpha_mag
    if disp.kind == "user_table":
        xs = np.array([x for x, _ in disp.table])
        ds = np.array([d for _, d in disp.table])
        if xs[0] > 0 or xs[-1] < L:
            raise InvalidDispersion(f"table must cover [0, {L}]")
        breaks = [0.0] + [float(x) for x in xs if 0 < x < L] + [L]
        total = 0.0
        for lo, hi in zip(breaks[:-1], breaks[1:]):
            total += adaptive_quadrature(
                lambda x: math.sqrt(mass / float(np.interp(x, xs, ds))), lo, hi, rel_tol=rel_tol
            ).value
        return total / alpha_mag
    fn = disp.function
    _check_dispersion_positive(fn, 0.0, L)

    def integrand(x):
        d = fn(x)
        if not d > 0:
            raise InvalidDispersion(f"energy deficit not positive at x = {x:.6g}")
        return math.sqrt(mass / d)

    total = 0.0
    for a, b, _ in barrier.segments:
        total += endpoint_singular_quadrature(integrand, a, b, rel_tol=rel_tol).value
    return total / alpha_mag


def measured_time_bound(E_inc: float, E_meas: float) -> float:
    if not E_meas < E_inc:
        raise InvalidMeasurement(f"measured energy {E_meas} must be below incident energy {E_inc}")
    return HBAR / (2.0 * (E_inc - E_meas))


def effective_height(sol: CouplingSolution) -> float:
    """Barrier height whose decay constant equals the length-averaged one
    (the actual height for a rectangular barrier)."""
    if sol.barrier.is_rectangular:
        return sol.barrier.heights[0]
    chi_eff = sol.profile.total_exponent / sol.barrier.length
    return sol.particle.energy + (HBAR * chi_eff) ** 2 / (2.0 * sol.particle.mass)


def tunnelling_times(
    sol: CouplingSolution,
    disp: DispersionProfile = DispersionProfile(),
    alpha_convention: str = "amplitude",
    measured_energy: Optional[float] = None,
) -> TunnellingTimes:
    """All four estimators for one configuration."""
    p = sol.particle
    U_eff = effective_height(sol)
    chi_eff = sol.profile.total_exponent / sol.barrier.length
    tau_exact = stop_time_exact(sol.rabi.omega0, chi_eff, p.mass) if sol.rabi.omega0 != 0 else None
    alpha_mag = abs(sol.mc.alpha)
    if alpha_convention == "probability":
        alpha_mag = alpha_mag ** 2
    elif alpha_convention != "amplitude":
        raise DomainError(f"unknown alpha convention {alpha_convention!r}")
    tau_transfer = traversal_time_transfer_matrix(alpha_mag, sol.barrier, p.energy, disp, mass=p.mass)
    bound = None if measured_energy is None else measured_time_bound(p.energy, measured_energy)
    return TunnellingTimes(tau_exact, stop_time_simplified(p, U_eff), tau_transfer, bound)


def hartman_scan(
    p: Particle,
    U0: float,
    V0: float,
    ep: EnergyPair,
    L_values: Sequence[float],
) -> List[Tuple[float, Optional[float], float]]:
    """Stop times versus barrier length.

    The simplified column cannot depend on L. The exact column depends on L
    only through omega0 and is reported as computed.
    """
    if not U0 > p.energy:
        raise NotEvanescent(f"U0 = {U0} does not exceed E = {p.energy}")
    pert = PerturbationSpec.constant(V0)
    tau_s = stop_time_simplified(p, U0)
    rows = []
    for L in L_values:
        if not L > 0:
            raise DomainError(f"L = {L} must be positive")
        sol = solve_coupling(p, BarrierSpec.rectangular(U0, L), pert, ep)
        tau_e = stop_time_exact(sol.rabi.omega0, sol.chi_abs, p.mass) if sol.rabi.omega0 != 0 else None
        rows.append((float(L), tau_e, tau_s))
    return rows
