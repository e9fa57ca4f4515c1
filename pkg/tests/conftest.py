import time

import pytest

from memsync import CouplingParams, Scenario, hr_model, run


@pytest.fixture(scope="session")
def hr_sync_run():
    """One full reference synchronization run, shared across tests.

    32x32 grid, dx=1, dt=0.00025, m=4, P=19.60, 2000 steps, amplitude-0.1
    seeded initial data, probe at cell (10, 10).
    """
    scenario = Scenario(
        model=hr_model(),
        coupling=CouplingParams(P=19.60, r=0.1, V=0.5),
        nx=32, ny=32, dx=1.0,
        dt=0.00025, n_steps=2000, m=4,
        seed=7, amplitude=0.1,
        record_every=1,
        probe=(10, 10),
    )
    start = time.perf_counter()
    traj = run(scenario)
    elapsed = time.perf_counter() - start
    return scenario, traj, elapsed
