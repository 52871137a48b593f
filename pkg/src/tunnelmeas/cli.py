"""Command-line front end.

    tunnelmeas <command> --config <path> [--out <prefix>] [--seed <int>]

Commands: model, density, times, oracle, hartman-scan, compare.
Exit codes: 0 success, 1 invalid input, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import datetime
import logging
import math
import platform
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import __version__
from .config import ScenarioConfig, load_config
from .core_model import Particle
from .coupling import CouplingSolution, ode_residual_profile, solve_coupling
from .density import DensitySolution, density_grid, envelope, flow_stop_root, rho_general, rho_rectangular
from .errors import InputError, NumericalError
from .serialize import write_csv, write_record
from .stationary import exact_rectangular_transmission
from .tdse_oracle import init_packet, propagate, region_probability, transmission_probability
from .tunnelling_time import DispersionProfile, hartman_scan, tunnelling_times

log = logging.getLogger("tunnelmeas")

COMMANDS = ("model", "density", "times", "oracle", "hartman-scan", "compare")

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2


def _coupling(cfg: ScenarioConfig) -> CouplingSolution:
    return solve_coupling(cfg.particle, cfg.barrier, cfg.perturbation, cfg.energy_pair, cfg.x_j, cfg.x_k)


def model_record(sol: CouplingSolution) -> dict:
    X, Y, rp = sol.X, sol.Y, sol.rabi
    return {
        "K": sol.K,
        "chi_abs": sol.chi_abs,
        "chi_segments": list(sol.profile.chis),
        "alpha": complex(sol.mc.alpha),
        "beta": complex(sol.mc.beta),
        "x_j": X.x_j,
        "x_k": X.x_k,
        "X": {"kk": complex(X.X_kk), "kj": complex(X.X_kj), "jk": complex(X.X_jk), "jj": complex(X.X_jj)},
        "Y": {"kk": complex(Y.Y_kk), "kj": complex(Y.Y_kj), "jk": complex(Y.Y_jk), "jj": complex(Y.Y_jj)},
        "omega0": rp.omega0,
        "omega": rp.omega,
        "omega_kj": rp.omega_kj,
    }


def _cmd_model(cfg, prefix) -> List[Path]:
    sol = _coupling(cfg)
    record = model_record(sol)
    files = []
    if sol.rabi.omega0 != 0:
        prof = ode_residual_profile(sol.rabi, sol.X, sol.Y)
        record["ode_residual_max_absolute"] = prof.max_absolute
        record["ode_residual_max_relative"] = prof.max_relative
        files.append(write_csv(
            f"{prefix}_residual.csv",
            ("t", "residual_1", "residual_2", "relative_1", "relative_2"),
            zip(prof.t, prof.residual_1, prof.residual_2, prof.relative_1, prof.relative_2),
        ))
    else:
        record["ode_residual_max_absolute"] = None
        record["ode_residual_max_relative"] = None
    files.insert(0, write_record(f"{prefix}_model.json", record))
    return files


def default_t_max(sol: CouplingSolution) -> float:
    w = sol.rabi.omega
    return 2.0 * math.pi / abs(w) if w != 0 else 10.0


def _cmd_density(cfg, prefix) -> List[Path]:
    sol = _coupling(cfg)
    ds = DensitySolution.from_coupling(sol)
    t_max = cfg.grid.t_max if cfg.grid.t_max is not None else default_t_max(sol)
    grid = density_grid(ds, 0.0, t_max, cfg.grid.nt, 0.0, cfg.barrier.length, cfg.grid.nx)
    if grid.negative_count:
        log.warning("%d density samples are negative", grid.negative_count)
    rows = ((t, x, grid.rho[i, j]) for i, t in enumerate(grid.t_values) for j, x in enumerate(grid.x_values))
    files = [write_csv(f"{prefix}_density.csv", ("t", "x", "rho"), rows)]
    if ds.rectangular:
        env = ((x, *envelope(ds, float(x))) for x in grid.x_values)
        files.append(write_csv(f"{prefix}_envelope.csv", ("x", "rho_min", "rho_max"), env))
    return files


def times_record(cfg: ScenarioConfig) -> dict:
    sol = _coupling(cfg)
    disp = DispersionProfile() if cfg.times.dispersion is None else DispersionProfile.from_table(cfg.times.dispersion)
    tt = tunnelling_times(sol, disp, cfg.times.alpha_convention, cfg.times.measured_energy)
    root = flow_stop_root(DensitySolution.from_coupling(sol)) if sol.barrier.is_rectangular else None
    return {
        "tau_exact": tt.tau_exact,
        "tau_simplified": tt.tau_simplified,
        "tau_transfer": tt.tau_transfer,
        "tau_measured_bound": tt.tau_measured_bound,
        "tau_flow_stop_root": root,
        "omega0": sol.rabi.omega0,
        "omega": sol.rabi.omega,
        "alpha_convention": cfg.times.alpha_convention,
    }


def _cmd_times(cfg, prefix) -> List[Path]:
    return [write_record(f"{prefix}_times.json", times_record(cfg))]


def _cmd_hartman(cfg, prefix) -> List[Path]:
    if not cfg.barrier.is_rectangular:
        raise InputError("hartman-scan needs a rectangular barrier")
    rows = hartman_scan(cfg.particle, cfg.barrier.heights[0], cfg.perturbation.amplitude, cfg.energy_pair, cfg.L_values)
    return [write_csv(f"{prefix}_hartman.csv", ("L", "tau_exact", "tau_simplified"), rows)]


def _run_oracle(cfg: ScenarioConfig, snapshot_every: Optional[int] = None):
    o = cfg.oracle
    grid = o.grid
    psi0 = init_packet(grid, o.packet)
    every = o.snapshot_every if snapshot_every is None else snapshot_every
    res = propagate(
        psi0, grid, cfg.barrier, cfg.perturbation, o.steps,
        mass=cfg.particle.mass, region=o.region, snapshot_every=every or None,
    )
    return grid, res


def oracle_record(cfg: ScenarioConfig, grid, res) -> dict:
    L = cfg.barrier.length
    T = transmission_probability(res.psi_final, grid, L)
    m = cfg.particle.mass
    wp = cfg.oracle.packet
    record = {
        "transmission": T,
        "reflection": res.reflection,
        "in_barrier": res.remainder,
        "total_norm": res.norm_history[-1],
        "norm_drift": res.norm_drift,
        "final_time": res.time,
        "steps": len(res.norm_history) - 1,
        "packet_energy": wp.energy(m),
        "packet_energy_spread": wp.energy_spread(m),
        "perturbation_region": cfg.oracle.region,
    }
    if cfg.barrier.is_rectangular:
        exact = exact_rectangular_transmission(Particle(m, wp.energy(m)), cfg.barrier.heights[0], L)
        record["exact_transmission_static_barrier"] = exact
        record["relative_difference"] = (T - exact) / exact
    return record


def _cmd_oracle(cfg, prefix) -> List[Path]:
    grid, res = _run_oracle(cfg)
    files = [write_record(f"{prefix}_oracle.json", oracle_record(cfg, grid, res))]
    if res.snapshots:
        x = grid.x
        rows = ((step, xi, d) for step, dens in res.snapshots for xi, d in zip(x, dens))
        files.append(write_csv(f"{prefix}_snapshots.csv", ("step", "x", "abs_psi_sq"), rows))
    return files


def _cmd_compare(cfg, prefix) -> List[Path]:
    """Analytic density against the oracle snapshot with the most probability
    inside the barrier. The oracle density is rescaled to match the analytic
    value at x = 0, since the two are normalised differently."""
    sol = _coupling(cfg)
    ds = DensitySolution.from_coupling(sol)
    every = max(1, cfg.oracle.steps // 200)
    grid, res = _run_oracle(cfg, snapshot_every=every)
    x = grid.x
    L = cfg.barrier.length
    inside_probs = [region_probability(x, dens, 0.0, L) for _, dens in res.snapshots]
    best = int(np.argmax(inside_probs))
    step, dens = res.snapshots[best]
    t = step * cfg.oracle.dt
    mask = (x >= 0.0) & (x <= L)
    xs = x[mask]
    if ds.rectangular:
        analytic = np.array([rho_rectangular(ds, t, float(xi)) for xi in xs])
    else:
        phiT, phiR = ds.profile.components(xs)
        analytic = np.array([rho_general(a, b, ds.rp, ds.X, t) for a, b in zip(phiT, phiR)])
    oracle = dens[mask]
    scale = analytic[0] / oracle[0] if oracle[0] > 0 else 0.0
    files = [write_csv(f"{prefix}_compare.csv", ("x", "rho_analytic", "rho_oracle_scaled"), zip(xs, analytic, oracle * scale))]
    summary = oracle_record(cfg, grid, res)
    summary.update({"snapshot_step": step, "snapshot_time": t, "oracle_scale": scale, "in_barrier_at_snapshot": inside_probs[best]})
    files.append(write_record(f"{prefix}_compare.json", summary))
    return files


_HANDLERS = {
    "model": _cmd_model,
    "density": _cmd_density,
    "times": _cmd_times,
    "oracle": _cmd_oracle,
    "hartman-scan": _cmd_hartman,
    "compare": _cmd_compare,
}


def run_command(cmd: str, cfg: ScenarioConfig, prefix: Optional[str] = None):
    """Run one command; returns ``(exit_code, written_files)``."""
    prefix = cfg.prefix if prefix is None else prefix
    Path(prefix).parent.mkdir(parents=True, exist_ok=True)
    try:
        files = _HANDLERS[cmd](cfg, prefix)
    except InputError as exc:
        log.error("invalid input: %s", exc)
        return EXIT_INPUT, []
    except NumericalError as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERIC, []
    return EXIT_OK, files


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tunnelmeas", description="Tunnelling under a time-dependent measurement perturbation.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="scenario file (section.key = value lines)")
    parser.add_argument("--out", default=None, help="output path prefix (overrides output.prefix)")
    parser.add_argument("--seed", type=int, default=None, help="reserved; no command is stochastic")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config)
    except OSError as exc:
        log.error("cannot read config: %s", exc)
        return EXIT_INPUT
    except InputError as exc:
        log.error("invalid config: %s", exc)
        return EXIT_INPUT
    prefix = args.out if args.out is not None else cfg.prefix
    code, files = run_command(args.command, cfg, prefix)
    if code == EXIT_OK:
        meta = {
            "command": args.command,
            "config": str(Path(args.config).resolve()),
            "version": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "outputs": [str(f) for f in files],
        }
        write_record(f"{prefix}_{args.command}.meta.json", meta)
        for f in files:
            print(f)
    return code


if __name__ == "__main__":
    sys.exit(main())
