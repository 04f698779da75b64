import pytest

from besovflow.fields import random_solenoidal
from besovflow.littlewood_paley import build_cutoffs
from besovflow.spectral import Grid
from besovflow.systems import SystemSpec, simulate
from besovflow.trajectory import SystemState


@pytest.fixture(scope="session")
def grid2():
    return Grid(2, 32)


@pytest.fixture(scope="session")
def grid3():
    return Grid(3, 16)


@pytest.fixture(scope="session")
def cutoffs2(grid2):
    return build_cutoffs(grid2)


@pytest.fixture(scope="session")
def cutoffs3(grid3):
    return build_cutoffs(grid3)


@pytest.fixture(scope="session")
def nse_spec():
    return SystemSpec("nse", 2, 0.05)


@pytest.fixture(scope="session")
def decaying_run(grid2, nse_spec):
    """Seeded decaying 2D box run shared by the monitor-level tests."""
    u0 = random_solenoidal(grid2, seed=11)
    return simulate(
        nse_spec,
        SystemState(0.0, {"u": u0}),
        1.0,
        2e-3,
        sample_every=5,
        seed=11,
    )
