"""Scenario configuration: a flat ``section.key = value`` text format.

Example::

    # worked case
    particle.mass = 1
    particle.energy = 0.5
    barrier.U0 = 1
    barrier.L = 1
    perturbation.kind = constant
    perturbation.V0 = 0.1

A piecewise barrier is given as ``barrier.segments = 0 0.5 1; 0.5 1 3``
(``x_start x_end U`` triples). Unknown keys and duplicated keys are errors.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from .core_model import BarrierSpec, EnergyPair, Particle, PerturbationSpec
from .errors import ParseError, ValidationError
from .tdse_oracle import GridSpec, WavePacket
from .tunnelling_time import DispersionProfile

DEFAULT_V0 = 0.1
DEFAULT_L_VALUES = (0.5, 1.0, 2.0, 4.0, 8.0)


@dataclass(frozen=True)
class GridOptions:
    nt: int = 101
    nx: int = 101
    # None: one oscillation period 2 pi/|omega| (10 if omega = 0)
    t_max: Optional[float] = None


@dataclass(frozen=True)
class OracleOptions:
    x_min: float
    x_max: float
    n_points: int
    dt: float
    steps: int
    x0: float
    sigma: float
    k0: float
    snapshot_every: int = 0
    region: str = "barrier"

    @property
    def grid(self) -> GridSpec:
        return GridSpec(self.x_min, self.x_max, self.n_points, self.dt)

    @property
    def packet(self) -> WavePacket:
        return WavePacket(self.x0, self.sigma, self.k0)


@dataclass(frozen=True)
class TimesOptions:
    alpha_convention: str = "amplitude"
    measured_energy: Optional[float] = None
    dispersion: Optional[Tuple[Tuple[float, float], ...]] = None


@dataclass(frozen=True)
class ScenarioConfig:
    particle: Particle
    barrier: BarrierSpec
    perturbation: PerturbationSpec
    energy_pair: EnergyPair
    x_j: float
    x_k: float
    grid: GridOptions
    oracle: OracleOptions
    times: TimesOptions
    L_values: Tuple[float, ...] = DEFAULT_L_VALUES
    prefix: str = "tunnelmeas_out"


_FLOAT, _INT, _STR, _SEGMENTS, _FLOATS, _TABLE = "float", "int", "str", "segments", "floats", "table"

SCHEMA: Dict[str, str] = {
    "particle.mass": _FLOAT,
    "particle.energy": _FLOAT,
    "barrier.U0": _FLOAT,
    "barrier.L": _FLOAT,
    "barrier.segments": _SEGMENTS,
    "perturbation.kind": _STR,
    "perturbation.V0": _FLOAT,
    "perturbation.omega": _FLOAT,
    "perturbation.t0": _FLOAT,
    "perturbation.sigma_t": _FLOAT,
    "energy_pair.E_k": _FLOAT,
    "energy_pair.E_j": _FLOAT,
    "measurement.x_j": _FLOAT,
    "measurement.x_k": _FLOAT,
    "grid.nt": _INT,
    "grid.nx": _INT,
    "grid.t_max": _FLOAT,
    "oracle.x_min": _FLOAT,
    "oracle.x_max": _FLOAT,
    "oracle.n_points": _INT,
    "oracle.dt": _FLOAT,
    "oracle.steps": _INT,
    "oracle.x0": _FLOAT,
    "oracle.sigma": _FLOAT,
    "oracle.k0": _FLOAT,
    "oracle.snapshot_every": _INT,
    "oracle.region": _STR,
    "times.alpha_convention": _STR,
    "times.measured_energy": _FLOAT,
    "times.dispersion": _TABLE,
    "hartman.L_values": _FLOATS,
    "output.prefix": _STR,
}


def _convert(kind, raw, lineno, key):
    try:
        if kind == _FLOAT:
            v = float(raw)
            if not math.isfinite(v):
                raise ValueError
            return v
        if kind == _INT:
            return int(raw)
        if kind == _STR:
            if not raw:
                raise ValueError
            return raw
        if kind == _FLOATS:
            return tuple(float(v) for v in raw.replace(",", " ").split())
        rows = [r.split() for r in raw.split(";") if r.strip()]
        width = 3 if kind == _SEGMENTS else 2
        if not rows or any(len(r) != width for r in rows):
            raise ValueError
        return tuple(tuple(float(v) for v in r) for r in rows)
    except ValueError:
        raise ParseError(f"cannot read {key} = {raw!r} as {kind}", line=lineno, key=key) from None


def _tokenize(text: str) -> Dict[str, object]:
    values: Dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ParseError(f"expected 'section.key = value', got {body!r}", line=lineno)
        key, raw = (s.strip() for s in body.split("=", 1))
        if key not in SCHEMA:
            raise ParseError(f"unknown key {key!r}", line=lineno, key=key)
        if key in values:
            raise ParseError(f"duplicate key {key!r}", line=lineno, key=key)
        values[key] = _convert(SCHEMA[key], raw, lineno, key)
    return values


def default_oracle(particle: Particle, L: float, perturbation_region: str = "barrier") -> OracleOptions:
    """Packet and grid sized so the packet clears the barrier before the walls
    matter: sigma = 20, start 6 sigma left of the barrier, 20 sigma padding."""
    k0 = math.sqrt(2.0 * particle.mass * particle.energy)
    sigma = 20.0
    x0 = -6.0 * sigma
    dt = 0.05
    grid = GridSpec.aligned(L, 20.0 * sigma, 20.0 * sigma, 0.1, dt)
    v = k0 / particle.mass
    steps = math.ceil(2.0 * abs(x0) / v / dt)
    return OracleOptions(grid.x_min, grid.x_max, grid.n_points, dt, steps, x0, sigma, k0, 0, perturbation_region)


def parse_config(text: str) -> ScenarioConfig:
    v = _tokenize(text)
    for req in ("particle.mass", "particle.energy"):
        if req not in v:
            raise ParseError(f"missing required key {req!r}", key=req)
    particle = Particle(v["particle.mass"], v["particle.energy"])

    if "barrier.segments" in v:
        if "barrier.U0" in v or "barrier.L" in v:
            raise ParseError("give either barrier.segments or barrier.U0/barrier.L, not both", key="barrier.segments")
        barrier = BarrierSpec(v["barrier.segments"])
    else:
        if "barrier.U0" not in v or "barrier.L" not in v:
            raise ParseError("barrier needs barrier.U0 and barrier.L (or barrier.segments)", key="barrier")
        barrier = BarrierSpec.rectangular(v["barrier.U0"], v["barrier.L"])
    for U in barrier.heights:
        if not U > particle.energy:
            raise ValidationError("barrier", f"height {U} must exceed the particle energy {particle.energy}")
    L = barrier.length

    kind = v.get("perturbation.kind", "constant")
    perturbation = PerturbationSpec(
        kind,
        v.get("perturbation.V0", DEFAULT_V0),
        angular_frequency=v.get("perturbation.omega"),
        center=v.get("perturbation.t0"),
        width=v.get("perturbation.sigma_t"),
    )
    energy_pair = EnergyPair(v.get("energy_pair.E_k", particle.energy), v.get("energy_pair.E_j", particle.energy))

    x_j = v.get("measurement.x_j", 0.0)
    x_k = v.get("measurement.x_k", L)
    if not 0.0 <= x_j < x_k <= L:
        raise ValidationError("measurement", f"need 0 <= x_j < x_k <= L, got [{x_j}, {x_k}]")

    grid = GridOptions(v.get("grid.nt", 101), v.get("grid.nx", 101), v.get("grid.t_max"))
    if grid.nt < 2 or grid.nx < 2:
        raise ValidationError("grid", "nt and nx must be at least 2")
    if grid.t_max is not None and not grid.t_max > 0:
        raise ValidationError("grid.t_max", "must be positive")

    oracle = default_oracle(particle, L, v.get("oracle.region", "barrier"))
    overrides = {
        name: v[f"oracle.{name}"]
        for name in (f.name for f in dataclasses.fields(OracleOptions))
        if f"oracle.{name}" in v
    }
    oracle = dataclasses.replace(oracle, **overrides)
    oracle.grid  # validates
    oracle.packet
    if oracle.steps < 1:
        raise ValidationError("oracle.steps", "must be positive")
    if oracle.snapshot_every < 0:
        raise ValidationError("oracle.snapshot_every", "must be non-negative")
    if oracle.region not in ("barrier", "global"):
        raise ValidationError("oracle.region", "must be 'barrier' or 'global'")
    if not L < oracle.x_max:
        raise ValidationError("oracle.x_max", "grid must extend beyond the barrier")

    times = TimesOptions(
        v.get("times.alpha_convention", "amplitude"),
        v.get("times.measured_energy"),
        v.get("times.dispersion"),
    )
    if times.alpha_convention not in ("amplitude", "probability"):
        raise ValidationError("times.alpha_convention", "must be 'amplitude' or 'probability'")
    if times.measured_energy is not None and not times.measured_energy < particle.energy:
        raise ValidationError("times.measured_energy", "must be below the incident energy")
    if times.dispersion is not None:
        try:
            DispersionProfile.from_table(times.dispersion)
        except Exception as exc:
            raise ValidationError("times.dispersion", str(exc)) from None

    L_values = v.get("hartman.L_values", DEFAULT_L_VALUES)
    if not L_values or any(not x > 0 for x in L_values):
        raise ValidationError("hartman.L_values", "need positive lengths")

    return ScenarioConfig(
        particle, barrier, perturbation, energy_pair, x_j, x_k, grid, oracle, times,
        tuple(L_values), v.get("output.prefix", "tunnelmeas_out"),
    )


def load_config(path) -> ScenarioConfig:
    with open(path, encoding="ascii") as fh:
        return parse_config(fh.read())


def _num(x) -> str:
    return repr(float(x)) if isinstance(x, float) else str(x)


def dump_config(cfg: ScenarioConfig) -> str:
    """Serialise to the text format; ``parse_config(dump_config(c)) == c``."""
    lines = [
        f"particle.mass = {_num(cfg.particle.mass)}",
        f"particle.energy = {_num(cfg.particle.energy)}",
    ]
    if cfg.barrier.is_rectangular:
        lines += [f"barrier.U0 = {_num(cfg.barrier.heights[0])}", f"barrier.L = {_num(cfg.barrier.length)}"]
    else:
        segs = "; ".join(" ".join(_num(v) for v in s) for s in cfg.barrier.segments)
        lines.append(f"barrier.segments = {segs}")
    p = cfg.perturbation
    lines += [f"perturbation.kind = {p.kind}", f"perturbation.V0 = {_num(p.amplitude)}"]
    for key, val in (("omega", p.angular_frequency), ("t0", p.center), ("sigma_t", p.width)):
        if val is not None:
            lines.append(f"perturbation.{key} = {_num(val)}")
    lines += [
        f"energy_pair.E_k = {_num(cfg.energy_pair.E_k)}",
        f"energy_pair.E_j = {_num(cfg.energy_pair.E_j)}",
        f"measurement.x_j = {_num(cfg.x_j)}",
        f"measurement.x_k = {_num(cfg.x_k)}",
        f"grid.nt = {cfg.grid.nt}",
        f"grid.nx = {cfg.grid.nx}",
    ]
    if cfg.grid.t_max is not None:
        lines.append(f"grid.t_max = {_num(cfg.grid.t_max)}")
    for f in dataclasses.fields(OracleOptions):
        lines.append(f"oracle.{f.name} = {_num(getattr(cfg.oracle, f.name))}")
    lines.append(f"times.alpha_convention = {cfg.times.alpha_convention}")
    if cfg.times.measured_energy is not None:
        lines.append(f"times.measured_energy = {_num(cfg.times.measured_energy)}")
    if cfg.times.dispersion is not None:
        lines.append("times.dispersion = " + "; ".join(f"{_num(x)} {_num(d)}" for x, d in cfg.times.dispersion))
    lines.append("hartman.L_values = " + ", ".join(_num(x) for x in cfg.L_values))
    lines.append(f"output.prefix = {cfg.prefix}")
    return "\n".join(lines) + "\n"
