import pytest

from swarmarch import ControlMode, EnergyModelParams, RunConfig, run
from swarmarch.model import ArchitectureKind

MODES = {
    "centralized": ControlMode.static(ArchitectureKind.CENTRALIZED),
    "hierarchical": ControlMode.static(ArchitectureKind.HIERARCHICAL),
    "holonic": ControlMode.static(ArchitectureKind.HOLONIC),
    "adaptive": ControlMode.adaptive(),
}


@pytest.fixture(scope="session")
def default_params():
    return EnergyModelParams()


@pytest.fixture(scope="session")
def default_runs():
    """The four headline runs: defaults, 150 iterations."""
    return {name: run(RunConfig(mode=mode)) for name, mode in MODES.items()}
