"""Physical inputs: particle, barrier profile, perturbation and energy pair.

Natural units throughout (hbar = 1). Every formula downstream keeps the mass
explicit, so any mass can be supplied.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Tuple

from .errors import DomainError, ValidationError

HBAR = 1.0

PERTURBATION_KINDS = ("constant", "sinusoidal", "gaussian_pulse")


def _finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(name, f"must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class Particle:
    mass: float
    energy: float

    def __post_init__(self):
        if not _finite("particle.mass", self.mass) > 0:
            raise ValidationError("particle.mass", "must be positive")
        if not _finite("particle.energy", self.energy) > 0:
            raise ValidationError("particle.energy", "must be positive")


@dataclass(frozen=True)
class BarrierSpec:
    """Piecewise-constant barrier on [0, L].

    ``segments`` is a tuple of ``(x_start, x_end, U)`` triples tiling the
    interval exactly.
    """

    segments: Tuple[Tuple[float, float, float], ...]

    def __post_init__(self):
        segs = tuple(tuple(float(v) for v in s) for s in self.segments)
        if not segs:
            raise ValidationError("barrier.segments", "at least one segment required")
        if segs[0][0] != 0.0:
            raise ValidationError("barrier.segments", "first segment must start at x = 0")
        for i, (a, b, u) in enumerate(segs):
            _finite("barrier.segments", u)
            if not (math.isfinite(a) and math.isfinite(b)) or b <= a:
                raise ValidationError("barrier.segments", f"segment {i} has non-positive width")
            if i + 1 < len(segs) and segs[i + 1][0] != b:
                raise ValidationError("barrier.segments", f"gap or overlap after segment {i}")
        object.__setattr__(self, "segments", segs)

    @classmethod
    def rectangular(cls, U0: float, L: float) -> "BarrierSpec":
        if not _finite("barrier.L", L) > 0:
            raise ValidationError("barrier.L", "must be positive")
        return cls(((0.0, float(L), float(U0)),))

    @property
    def length(self) -> float:
        return self.segments[-1][1]

    @property
    def is_rectangular(self) -> bool:
        return len(self.segments) == 1

    @property
    def edges(self) -> Tuple[float, ...]:
        return (0.0,) + tuple(s[1] for s in self.segments)

    @property
    def heights(self) -> Tuple[float, ...]:
        return tuple(s[2] for s in self.segments)


def potential_at(barrier: BarrierSpec, x: float) -> float:
    """U(x) with right-closed lookup: an interior edge belongs to the right
    segment, x = L to the last segment."""
    L = barrier.length
    if not 0.0 <= x <= L:
        raise DomainError(f"x = {x} outside barrier [0, {L}]")
    starts = [s[0] for s in barrier.segments]
    i = bisect.bisect_right(starts, x) - 1
    return barrier.segments[i][2]


@dataclass(frozen=True)
class PerturbationSpec:
    """Time-dependent interaction U(t) = V0 * w(t).

    constant: w = 1; sinusoidal: w = sin(omega t);
    gaussian_pulse: w = exp(-(t - t0)^2 / (2 sigma_t^2)).
    """

    kind: str = "constant"
    amplitude: float = 0.1
    angular_frequency: float | None = None
    center: float | None = None
    width: float | None = None

    def __post_init__(self):
        if self.kind not in PERTURBATION_KINDS:
            raise ValidationError("perturbation.kind", f"unknown kind {self.kind!r}")
        _finite("perturbation.V0", self.amplitude)
        if self.kind == "sinusoidal":
            if self.angular_frequency is None or not _finite("perturbation.omega", self.angular_frequency) > 0:
                raise ValidationError("perturbation.omega", "sinusoidal kind needs a positive angular frequency")
        if self.kind == "gaussian_pulse":
            if self.center is None or not _finite("perturbation.t0", self.center) > 0:
                raise ValidationError("perturbation.t0", "gaussian_pulse needs a positive center")
            if self.width is None or not _finite("perturbation.sigma_t", self.width) > 0:
                raise ValidationError("perturbation.sigma_t", "gaussian_pulse needs a positive width")

    @classmethod
    def constant(cls, V0: float) -> "PerturbationSpec":
        return cls("constant", V0)

    @classmethod
    def sinusoidal(cls, V0: float, omega: float) -> "PerturbationSpec":
        return cls("sinusoidal", V0, angular_frequency=omega)

    @classmethod
    def gaussian_pulse(cls, V0: float, t0: float, sigma_t: float) -> "PerturbationSpec":
        return cls("gaussian_pulse", V0, center=t0, width=sigma_t)


def _check_time(t: float) -> None:
    if not t >= 0:
        raise DomainError(f"t = {t} must be non-negative")


def perturbation_at(pert: PerturbationSpec, t: float) -> float:
    _check_time(t)
    V0 = pert.amplitude
    if pert.kind == "constant":
        return V0
    if pert.kind == "sinusoidal":
        return V0 * math.sin(pert.angular_frequency * t)
    s = (t - pert.center) / pert.width
    return V0 * math.exp(-0.5 * s * s)


def perturbation_phase_integral(pert: PerturbationSpec, t: float) -> float:
    """Closed-form integral of U(t') over [0, t]."""
    _check_time(t)
    V0 = pert.amplitude
    if pert.kind == "constant":
        return V0 * t
    if pert.kind == "sinusoidal":
        W = pert.angular_frequency
        # 1 - cos(Wt) = 2 sin^2(Wt/2) avoids cancellation at small Wt
        return V0 * 2.0 * math.sin(0.5 * W * t) ** 2 / W
    t0, sig = pert.center, pert.width
    c = sig * math.sqrt(math.pi / 2.0)
    r = math.sqrt(2.0) * sig
    return V0 * c * (math.erf((t - t0) / r) + math.erf(t0 / r))


@dataclass(frozen=True)
class EnergyPair:
    """Energies measured on the two sides of the barrier."""

    E_k: float
    E_j: float

    def __post_init__(self):
        if not _finite("energy_pair.E_k", self.E_k) > 0:
            raise ValidationError("energy_pair.E_k", "must be positive")
        if not _finite("energy_pair.E_j", self.E_j) > 0:
            raise ValidationError("energy_pair.E_j", "must be positive")

    @property
    def omega_kj(self) -> float:
        return (self.E_k - self.E_j) / HBAR

    @property
    def omega_jk(self) -> float:
        return (self.E_j - self.E_k) / HBAR

    def swapped(self) -> "EnergyPair":
        return EnergyPair(self.E_j, self.E_k)
