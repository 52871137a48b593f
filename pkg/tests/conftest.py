import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tunnelmeas import BarrierSpec, EnergyPair, Particle, PerturbationSpec, solve_coupling  # noqa: E402
from tunnelmeas.density import DensitySolution  # noqa: E402


@pytest.fixture
def worked():
    """chi = 1, L = 1, alpha = 1, V0 = 0.1, E_k = E_j, m = 1."""
    return solve_coupling(
        Particle(1.0, 0.5), BarrierSpec.rectangular(1.0, 1.0), PerturbationSpec.constant(0.1), EnergyPair(0.5, 0.5)
    )


@pytest.fixture
def worked_density(worked):
    return DensitySolution.from_coupling(worked)


ACCEPTANCE_LINES = {}


@pytest.fixture
def report():
    """Record one pass/fail line per acceptance criterion."""

    def _report(number, name, ok, detail=""):
        ACCEPTANCE_LINES[number] = f"[{number:2d}] {'PASS' if ok else 'FAIL'}  {name}  {detail}".rstrip()
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
