"""Overlap/transition matrices, coupling frequencies and the two-state
amplitudes a_k(t), a_j(t).

Index convention: ``k`` labels the transmitted component phi_T, ``j`` the
reflected component phi_R. ``X_kj = int conj(phi_T) phi_R``,
``X_jk = int conj(phi_R) phi_T``, ``X_kk = int |phi_T|^2``,
``X_jj = int |phi_R|^2``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core_model import HBAR, BarrierSpec, EnergyPair, Particle, PerturbationSpec
from .errors import DomainError, SingularOverlap
from .numerics import adaptive_quadrature, sinc_sq_half
from .stationary import EvanescentProfile, MatchingCoefficients, incident_wavevector

SINGULARITY_TOL = 1e-14


@dataclass(frozen=True)
class OverlapMatrix:
    X_kk: complex
    X_kj: complex
    X_jk: complex
    X_jj: complex
    x_j: float
    x_k: float

    @property
    def determinant(self) -> complex:
        return self.X_kk * self.X_jj - self.X_kj * self.X_jk


@dataclass(frozen=True)
class TransitionMatrix:
    Y_kj: complex
    Y_jk: complex
    Y_kk: complex = 0.0
    Y_jj: complex = 0.0


@dataclass(frozen=True)
class RabiParameters:
    omega0: float
    omega: float
    omega_kj: float


def _check_interval(x_j, x_k):
    if not x_j < x_k:
        raise DomainError(f"need x_j < x_k, got [{x_j}, {x_k}]")
    if x_j < 0:
        raise DomainError(f"x_j = {x_j} must be >= 0")


def overlap_matrix(
    mc: MatchingCoefficients,
    chi_abs: float,
    x_j: float,
    x_k: float,
    method: str = "closed_form",
) -> OverlapMatrix:
    """Overlap entries for a single-segment (rectangular) barrier."""
    _check_interval(x_j, x_k)
    if not chi_abs > 0:
        raise DomainError(f"chi_abs must be positive, got {chi_abs}")
    a, b = complex(mc.alpha), complex(mc.beta)
    if method == "closed_form":
        d = x_k - x_j
        two_chi = 2.0 * chi_abs
        X_kk = abs(a) ** 2 * -math.expm1(-two_chi * d) * math.exp(-two_chi * x_j) / two_chi
        X_jj = abs(b) ** 2 * math.expm1(two_chi * d) * math.exp(two_chi * x_j) / two_chi
        X_kj = a.conjugate() * b * d
        X_jk = b.conjugate() * a * d
    elif method == "quadrature":
        def T(x):
            return a * math.exp(-chi_abs * x)

        def R(x):
            return b * math.exp(chi_abs * x)

        X_kk, X_kj, X_jk, X_jj = _quad_entries(T, R, [x_j, x_k])
    else:
        raise DomainError(f"unknown overlap method {method!r}")
    return OverlapMatrix(X_kk, X_kj, X_jk, X_jj, float(x_j), float(x_k))


def _quad_entries(T, R, breaks, rel_tol=1e-13):
    entries = []
    for integrand in (
        lambda x: abs(T(x)) ** 2,
        lambda x: T(x).conjugate() * R(x),
        lambda x: R(x).conjugate() * T(x),
        lambda x: abs(R(x)) ** 2,
    ):
        total = 0.0
        for lo, hi in zip(breaks[:-1], breaks[1:]):
            total += adaptive_quadrature(integrand, lo, hi, rel_tol=rel_tol).value
        entries.append(total)
    return entries


def overlap_matrix_profile(
    profile: EvanescentProfile,
    x_j: float = 0.0,
    x_k: Optional[float] = None,
    method: str = "closed_form",
) -> OverlapMatrix:
    """Overlap entries over a piecewise barrier, segment by segment."""
    L = profile.barrier.length
    x_k = L if x_k is None else x_k
    _check_interval(x_j, x_k)
    if x_k > L:
        raise DomainError(f"x_k = {x_k} beyond barrier end {L}")
    a, b = profile.mc.alpha, profile.mc.beta
    edges = profile.barrier.edges
    breaks = [x_j] + [e for e in edges if x_j < e < x_k] + [x_k]
    if method == "quadrature":
        def T(x):
            return a * math.exp(-float(profile.exponent(x)))

        def R(x):
            return b * math.exp(float(profile.exponent(x)))

        X_kk, X_kj, X_jk, X_jj = _quad_entries(T, R, breaks)
    elif method == "closed_form":
        d = x_k - x_j
        X_kj = a.conjugate() * b * d
        X_jk = b.conjugate() * a * d
        X_kk = X_jj = 0.0
        for lo, hi in zip(breaks[:-1], breaks[1:]):
            mid = 0.5 * (lo + hi)
            i = min(np.searchsorted(edges, mid, side="right") - 1, len(profile.chis) - 1)
            two_chi = 2.0 * profile.chis[i]
            s_lo = profile.offsets[i] + profile.chis[i] * (lo - edges[i])
            X_kk += abs(a) ** 2 * math.exp(-2.0 * s_lo) * -math.expm1(-two_chi * (hi - lo)) / two_chi
            X_jj += abs(b) ** 2 * math.exp(2.0 * s_lo) * math.expm1(two_chi * (hi - lo)) / two_chi
    else:
        raise DomainError(f"unknown overlap method {method!r}")
    return OverlapMatrix(X_kk, X_kj, X_jk, X_jj, float(x_j), float(x_k))


def transition_matrix(X: OverlapMatrix, pert: PerturbationSpec) -> TransitionMatrix:
    """Perturbation-weighted overlaps at unit envelope (w = 1).

    U(t) is x-independent, so it factors out of the spatial integral and
    only its amplitude V0 remains.
    """
    V0 = pert.amplitude
    return TransitionMatrix(Y_kj=V0 * X.X_jk, Y_jk=V0 * X.X_kj)


def rabi_frequencies(
    X: OverlapMatrix,
    Y: TransitionMatrix,
    ep: EnergyPair,
    singularity_tol: float = SINGULARITY_TOL,
) -> RabiParameters:
    """omega0 = X_kj Y_jk / D with D = X_kk X_jj - X_kj X_jk, and
    omega = omega_jk - omega0 where omega_jk = (E_j - E_k)/hbar."""
    D = X.determinant
    scale = abs(X.X_kk * X.X_jj)
    if not abs(D) > singularity_tol * scale:
        raise SingularOverlap(f"overlap determinant {abs(D):.3e} below {singularity_tol:g} x {scale:.3e}")
    omega0 = X.X_kj * Y.Y_jk / D
    omega0 = complex(omega0)
    if abs(omega0.imag) > 1e-12 * max(abs(omega0), 1e-300):
        raise SingularOverlap(f"complex coupling frequency {omega0}")
    w0 = omega0.real
    return RabiParameters(omega0=w0, omega=ep.omega_jk - w0, omega_kj=ep.omega_kj)


def _amplitudes(rp: RabiParameters, ratio: complex, t: float):
    phase = cmath.exp(1j * rp.omega0 * t)
    s = math.copysign(sinc_sq_half(rp.omega, abs(t), 1), t)
    return phase, -1j * rp.omega0 * ratio * phase * s


def amplitude_coefficients(rp: RabiParameters, X: OverlapMatrix, t: float):
    """``(a_k(t), a_j(t))`` with a_k(0) = 1, a_j(0) = 0."""
    if t < 0:
        raise DomainError(f"t = {t} must be non-negative")
    if X.X_kj == 0:
        raise SingularOverlap("X_kj = 0: amplitude ratio X_kk/X_kj undefined")
    return _amplitudes(rp, X.X_kk / X.X_kj, t)


@dataclass
class ResidualProfile:
    """Residuals of the coupled amplitude equations along a time grid.

    ``residual_1``/``residual_2`` are the absolute residuals of the two
    equations; ``relative_1``/``relative_2`` divide by the summed magnitude
    of the terms in each equation.
    """

    t: np.ndarray
    residual_1: np.ndarray
    residual_2: np.ndarray
    relative_1: np.ndarray
    relative_2: np.ndarray

    @property
    def max_relative(self) -> float:
        return float(max(self.relative_1.max(), self.relative_2.max()))

    @property
    def max_absolute(self) -> float:
        return float(max(self.residual_1.max(), self.residual_2.max()))


def ode_residual_profile(
    rp: RabiParameters,
    X: OverlapMatrix,
    Y: TransitionMatrix,
    t_max: Optional[float] = None,
    n: int = 201,
    h: float = 1e-5,
) -> ResidualProfile:
    """Substitute a_k, a_j into both coupled equations and record residuals.

    Derivatives are central finite differences (one-sided near t = 0).
    The default window is ``[0, 10/|omega0|]``.
    """
    if X.X_kj == 0:
        raise SingularOverlap("X_kj = 0: amplitude ratio X_kk/X_kj undefined")
    if t_max is None:
        if rp.omega0 == 0:
            raise DomainError("omega0 = 0: give t_max explicitly")
        t_max = 10.0 / abs(rp.omega0)
    ratio = X.X_kk / X.X_kj
    ts = np.linspace(0.0, t_max, n)
    out = np.zeros((4, n))
    for i, t in enumerate(ts):
        ak, aj = _amplitudes(rp, ratio, t)
        if t >= h:
            (kp, jp), (km, jm) = _amplitudes(rp, ratio, t + h), _amplitudes(rp, ratio, t - h)
            dak, daj = (kp - km) / (2 * h), (jp - jm) / (2 * h)
        else:
            (k1, j1), (k2, j2) = _amplitudes(rp, ratio, t + h), _amplitudes(rp, ratio, t + 2 * h)
            dak = (-3 * ak + 4 * k1 - k2) / (2 * h)
            daj = (-3 * aj + 4 * j1 - j2) / (2 * h)
        e = cmath.exp(1j * rp.omega_kj * t)
        terms1 = (1j * HBAR * dak * X.X_jk, 1j * HBAR * daj * X.X_jj * e, -ak * Y.Y_kj, -aj * Y.Y_jj * e)
        terms2 = (1j * HBAR * dak * X.X_kk, 1j * HBAR * daj * X.X_kj * e, -ak * Y.Y_kk, -aj * Y.Y_jk * e)
        r1, r2 = abs(sum(terms1)), abs(sum(terms2))
        out[:, i] = (
            r1,
            r2,
            r1 / max(sum(abs(v) for v in terms1), 1e-300),
            r2 / max(sum(abs(v) for v in terms2), 1e-300),
        )
    return ResidualProfile(ts, *out)


@dataclass(frozen=True)
class CouplingSolution:
    """Everything the analytic model derives for one measured energy pair."""

    particle: Particle
    barrier: BarrierSpec
    perturbation: PerturbationSpec
    energy_pair: EnergyPair
    profile: EvanescentProfile
    K: float
    X: OverlapMatrix
    Y: TransitionMatrix
    rabi: RabiParameters

    @property
    def mc(self) -> MatchingCoefficients:
        return self.profile.mc

    @property
    def chi_abs(self) -> float:
        """Decay constant of a rectangular barrier (first segment otherwise)."""
        return self.profile.chis[0]


def solve_coupling(
    particle: Particle,
    barrier: BarrierSpec,
    perturbation: PerturbationSpec,
    energy_pair: Optional[EnergyPair] = None,
    x_j: float = 0.0,
    x_k: Optional[float] = None,
    incident_amplitude: complex = 1.0,
) -> CouplingSolution:
    """Match, build X and Y over ``[x_j, x_k]`` (default the whole barrier)
    and compute the coupling frequencies."""
    if energy_pair is None:
        energy_pair = EnergyPair(particle.energy, particle.energy)
    profile = EvanescentProfile.build(particle, barrier, incident_amplitude)
    if barrier.is_rectangular:
        x_k = barrier.length if x_k is None else x_k
        if x_k > barrier.length:
            raise DomainError(f"x_k = {x_k} beyond barrier end {barrier.length}")
        X = overlap_matrix(profile.mc, profile.chis[0], x_j, x_k)
    else:
        X = overlap_matrix_profile(profile, x_j, x_k)
    Y = transition_matrix(X, perturbation)
    rp = rabi_frequencies(X, Y, energy_pair)
    return CouplingSolution(
        particle, barrier, perturbation, energy_pair, profile,
        incident_wavevector(particle), X, Y, rp,
    )
