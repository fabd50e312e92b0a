import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from softarm_rc.arm import ArmParams
from softarm_rc.harness import DESK_SPLIT, run_trial
from softarm_rc.sweep import SweepGrid, trial_config

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def desk_cell_grid():
    """Desk-profile grid reduced to the single cell A = 6, tau = 1 s."""
    return SweepGrid(amplitudes=(6.0,), taus=(1.0,), trials=5, narma_orders=(2, 5, 9),
                     split=DESK_SPLIT)


@pytest.fixture(scope="session")
def desk_trials(desk_cell_grid):
    """Five seeded arm trials at (A, tau) = (6, 1), shared by the slow tests."""
    arm = ArmParams()
    return [run_trial(trial_config(desk_cell_grid, arm, 0, 0, k))
            for k in range(desk_cell_grid.trials)]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line for an acceptance criterion and return the verdict."""
    def record(number, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
        print(line)
        _ACCEPTANCE_LINES.append((number, line))
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
