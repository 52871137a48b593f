"""In-barrier probability density rho(t, x), its envelope and its
spatial derivative.

Two evaluators exist. :func:`rho_general` keeps the explicit
``phi_T``/``phi_R`` factors and works for any barrier profile.
:func:`rho_rectangular`, :func:`envelope` and
:func:`rho_spatial_derivative` use the closed rectangular-barrier forms
exactly as written in the model, including their x-independent
oscillating terms.

Interference can make the closed forms negative for some parameters. Values
are returned unclipped and counted in :attr:`DensityGrid.negative_count`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from .core_model import HBAR, BarrierSpec
from .coupling import CouplingSolution, OverlapMatrix, RabiParameters
from .errors import DomainError, SingularOverlap, UnsupportedBarrier
from .numerics import sin_sq_over_half, sinc_sq_half
from .stationary import EvanescentProfile, MatchingCoefficients


@dataclass(frozen=True)
class DensitySolution:
    mc: MatchingCoefficients
    chi_abs: float
    rp: RabiParameters
    X: OverlapMatrix
    mass: float
    barrier: BarrierSpec
    profile: EvanescentProfile

    @classmethod
    def from_coupling(cls, sol: CouplingSolution) -> "DensitySolution":
        return cls(sol.mc, sol.chi_abs, sol.rabi, sol.X, sol.particle.mass, sol.barrier, sol.profile)

    @property
    def rectangular(self) -> bool:
        return self.barrier.is_rectangular

    @property
    def ratio(self) -> complex:
        if self.X.X_kj == 0:
            raise SingularOverlap("X_kj = 0: amplitude ratio X_kk/X_kj undefined")
        return self.X.X_kk / self.X.X_kj


def rho_general(phiT: complex, phiR: complex, rp: RabiParameters, X: OverlapMatrix, t: float) -> float:
    """Three-term density: transmitted, reflected and interference parts."""
    if t < 0:
        raise DomainError(f"t = {t} must be non-negative")
    if X.X_kj == 0:
        raise SingularOverlap("X_kj = 0: amplitude ratio X_kk/X_kj undefined")
    phiT, phiR = complex(phiT), complex(phiR)
    ratio = X.X_kk / X.X_kj
    w0 = rp.omega0
    direct = abs(phiT) ** 2
    reflected = w0 * w0 * abs(ratio) ** 2 * abs(phiR) ** 2 * sinc_sq_half(rp.omega, t, 2)
    interference = 2.0 * w0 * ratio * phiT.conjugate() * phiR * sin_sq_over_half(rp.omega, t)
    return direct + reflected + complex(interference).real


def _require_rectangular(sol: DensitySolution, x: float) -> None:
    if not sol.rectangular:
        raise UnsupportedBarrier("closed rectangular form needs a single-segment barrier; use rho_general")
    if not 0.0 <= x <= sol.barrier.length:
        raise DomainError(f"x = {x} outside barrier [0, {sol.barrier.length}]")


def _terms(sol: DensitySolution, x: float):
    """(|alpha|^2 e^{-2 chi x}, 4|alpha|^2 hbar^2 chi^4/m^2, 2 w0 ratio conj(alpha) beta).

    With omega0 = 0 the perturbation-driven terms are dropped: the substituted
    second term only stands in for a quantity proportional to omega0^2.
    """
    a2 = abs(sol.mc.alpha) ** 2
    base = a2 * math.exp(-2.0 * sol.chi_abs * x)
    if sol.rp.omega0 == 0:
        return base, 0.0, 0.0
    chi4 = sol.chi_abs ** 4
    growth = 4.0 * a2 * HBAR ** 2 * chi4 / sol.mass ** 2
    cross = complex(2.0 * sol.rp.omega0 * sol.ratio * complex(sol.mc.alpha).conjugate() * sol.mc.beta).real
    return base, growth, cross


def rho_rectangular(sol: DensitySolution, t: float, x: float) -> float:
    _require_rectangular(sol, x)
    if t < 0:
        raise DomainError(f"t = {t} must be non-negative")
    base, growth, cross = _terms(sol, x)
    w = sol.rp.omega
    return base + growth * sinc_sq_half(w, t, 2) + cross * sin_sq_over_half(w, t)


def envelope(sol: DensitySolution, x: float) -> Tuple[float, float]:
    """``(rho_min, rho_max)`` at ``x``; rho_max is infinite on resonance
    (omega = 0 with omega0 != 0)."""
    _require_rectangular(sol, x)
    base, growth, cross = _terms(sol, x)
    if growth == 0.0 and cross == 0.0:
        return base, base
    half = 0.5 * sol.rp.omega
    if half == 0.0:
        return base, math.inf
    return base, base + growth / half ** 2 + cross / half


def rho_spatial_derivative(sol: DensitySolution, t: float, x: float) -> float:
    """Stop-the-flow derivative
    ``-2|alpha|^2 chi e^{-2 chi x} [1 - 4 hbar^2 chi^4/m^2 sin^2(wt/2)/(w/2)^2]``."""
    _require_rectangular(sol, x)
    if t < 0:
        raise DomainError(f"t = {t} must be non-negative")
    a2 = abs(sol.mc.alpha) ** 2
    chi = sol.chi_abs
    bracket = 1.0
    if sol.rp.omega0 != 0:
        bracket -= 4.0 * HBAR ** 2 * chi ** 4 / sol.mass ** 2 * sinc_sq_half(sol.rp.omega, t, 2)
    return -2.0 * a2 * chi * math.exp(-2.0 * chi * x) * bracket


def flow_stop_root(sol: DensitySolution) -> Optional[float]:
    """First t > 0 where the bracket of :func:`rho_spatial_derivative`
    vanishes, found numerically; ``None`` if it never does."""
    if not sol.rectangular:
        raise UnsupportedBarrier("flow-stop root needs a single-segment barrier")
    if sol.rp.omega0 == 0:
        return None
    c = 4.0 * HBAR ** 2 * sol.chi_abs ** 4 / sol.mass ** 2
    w = sol.rp.omega

    def bracket(t):
        return 1.0 - c * sinc_sq_half(w, t, 2)

    # sinc^2 rises monotonically from 0 to its maximum at t = pi/|w|
    t_hi = math.pi / abs(w) if w != 0 else 1.0 / math.sqrt(c)
    if bracket(t_hi) > 0:
        return None
    return brentq(bracket, 0.0, t_hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)


@dataclass
class DensityGrid:
    """``rho[i, j] = rho(t_values[i], x_values[j])``."""

    t_values: np.ndarray
    x_values: np.ndarray
    rho: np.ndarray
    negative_count: int = 0


def density_grid(
    sol: DensitySolution,
    t_min: float,
    t_max: float,
    nt: int,
    x_min: float = 0.0,
    x_max: Optional[float] = None,
    nx: int = 101,
) -> DensityGrid:
    if nt < 2 or nx < 2:
        raise DomainError("need at least 2 points per axis")
    L = sol.barrier.length
    x_max = L if x_max is None else x_max
    if not (0.0 <= x_min < x_max <= L):
        raise DomainError(f"x range [{x_min}, {x_max}] not inside [0, {L}]")
    if not (0.0 <= t_min < t_max):
        raise DomainError(f"t range [{t_min}, {t_max}] invalid")
    ts = np.linspace(t_min, t_max, nt)
    xs = np.linspace(x_min, x_max, nx)
    rho = np.empty((nt, nx))
    if sol.rectangular:
        for i, t in enumerate(ts):
            for j, x in enumerate(xs):
                rho[i, j] = rho_rectangular(sol, float(t), float(x))
    else:
        phiT, phiR = sol.profile.components(xs)
        for i, t in enumerate(ts):
            for j in range(nx):
                rho[i, j] = rho_general(phiT[j], phiR[j], sol.rp, sol.X, float(t))
    return DensityGrid(ts, xs, rho, int(np.count_nonzero(rho < 0)))
