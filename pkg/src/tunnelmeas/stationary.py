"""Wave vectors, evanescent basis and boundary-matched amplitudes.

Inside the barrier the spatial solution is a transmitted component
``alpha * exp(-chi x)`` and a reflected component ``beta * exp(+chi x)``.
The amplitudes follow from two matching rules: the transmitted component
equals the incident wave at ``x = 0``, and the two components coincide at
``x = L``. Derivative continuity is *not* imposed; the textbook transmission
coefficient is available separately as
:func:`exact_rectangular_transmission`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .core_model import HBAR, BarrierSpec, Particle
from .errors import DomainError, NotEvanescent


@dataclass(frozen=True)
class WaveVectors:
    K: float
    chi_abs: float


@dataclass(frozen=True)
class MatchingCoefficients:
    alpha: complex
    beta: complex


def incident_wavevector(p: Particle) -> float:
    return math.sqrt(2.0 * p.mass * p.energy) / HBAR


def evanescent_kappa(p: Particle, U: float) -> float:
    if not U > p.energy:
        raise NotEvanescent(f"U = {U} does not exceed E = {p.energy}")
    return math.sqrt(2.0 * p.mass * (U - p.energy)) / HBAR


def wave_vectors(p: Particle, U: float) -> WaveVectors:
    return WaveVectors(incident_wavevector(p), evanescent_kappa(p, U))


def evanescent_waves(chi_abs: float, x: float) -> Tuple[float, float]:
    """Decaying and growing basis functions ``(f, g)`` at ``x``."""
    return math.exp(-chi_abs * x), math.exp(chi_abs * x)


def match_boundaries(incident_amplitude: complex, chi_abs: float, L: float) -> MatchingCoefficients:
    if not L > 0:
        raise DomainError(f"barrier length must be positive, got {L}")
    if not chi_abs > 0:
        raise DomainError(f"chi_abs must be positive, got {chi_abs}")
    alpha = complex(incident_amplitude)
    return MatchingCoefficients(alpha, alpha * math.exp(-2.0 * chi_abs * L))


def exact_rectangular_transmission(p: Particle, U0: float, L: float) -> float:
    """Textbook stationary transmission probability of a rectangular barrier."""
    if not L > 0:
        raise DomainError(f"barrier length must be positive, got {L}")
    chi = evanescent_kappa(p, U0)
    E = p.energy
    return 1.0 / (1.0 + U0 * U0 * math.sinh(chi * L) ** 2 / (4.0 * E * (U0 - E)))


@dataclass(frozen=True)
class EvanescentProfile:
    """Matched evanescent components over a piecewise-constant barrier.

    Each segment carries its own decay constant. The transmitted envelope is
    chained across internal edges by continuity,
    ``T(x) = alpha * exp(-int_0^x chi)``, the reflected one is
    ``R(x) = beta * exp(+int_0^x chi)``, and ``R(L) = T(L)`` fixes beta. For a
    single segment this reduces to :func:`match_boundaries`.
    """

    barrier: BarrierSpec
    chis: Tuple[float, ...]
    mc: MatchingCoefficients
    # accumulated decay exponent int_0^{x_s} chi at each segment start
    offsets: Tuple[float, ...]

    @classmethod
    def build(cls, p: Particle, barrier: BarrierSpec, incident_amplitude: complex = 1.0) -> "EvanescentProfile":
        chis = tuple(evanescent_kappa(p, u) for u in barrier.heights)
        offsets = [0.0]
        for (a, b, _), chi in zip(barrier.segments, chis):
            offsets.append(offsets[-1] + chi * (b - a))
        alpha = complex(incident_amplitude)
        beta = alpha * math.exp(-2.0 * offsets[-1])
        return cls(barrier, chis, MatchingCoefficients(alpha, beta), tuple(offsets))

    def exponent(self, x):
        """``int_0^x chi(x') dx'`` (vectorised over ``x``)."""
        x = np.asarray(x, dtype=float)
        edges = np.asarray(self.barrier.edges)
        idx = np.clip(np.searchsorted(edges, x, side="right") - 1, 0, len(self.chis) - 1)
        chis = np.asarray(self.chis)
        offs = np.asarray(self.offsets[:-1])
        return offs[idx] + chis[idx] * (x - edges[idx])

    def components(self, x):
        """``(phi_T(x), phi_R(x))``."""
        s = self.exponent(x)
        return self.mc.alpha * np.exp(-s), self.mc.beta * np.exp(s)

    @property
    def total_exponent(self) -> float:
        return self.offsets[-1]
