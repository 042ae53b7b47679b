import math

import pytest

from dirac_shell.models.circle import CircleConfig, CouplingPair
from dirac_shell.models.line import LineConfig
from dirac_shell.services.circle_spectrum import sweep


@pytest.fixture(scope="session")
def tau0_config() -> CircleConfig:
    return CircleConfig(mass=1.0, radius=1.0, coupling=CouplingPair(eta=2.0, tau=0.0))


@pytest.fixture(scope="session", params=[-5.0, 0.0, 5.0], ids=["tau=-5", "tau=0", "tau=5"])
def ev_config(request) -> CircleConfig:
    return CircleConfig(mass=1.0, radius=1.0, coupling=CouplingPair.from_tau(request.param))


@pytest.fixture(scope="session")
def tau0_sweep(tau0_config):
    return sweep(tau0_config, -60, 60)


@pytest.fixture(scope="session")
def tau0_eigenvalues(tau0_sweep):
    return {record.k: record.z for record in tau0_sweep.records}


@pytest.fixture(scope="session")
def line_b0_config() -> LineConfig:
    return LineConfig(mass=1.0, coupling=CouplingPair(eta=2.0, tau=0.0))


@pytest.fixture(scope="session")
def line_tilted_config() -> LineConfig:
    return LineConfig(mass=1.0, coupling=CouplingPair(eta=math.sqrt(13.0), tau=-3.0))
