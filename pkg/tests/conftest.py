import hypothesis
import numpy as np
import pytest

from fluxem.analysis import run_transfer
from fluxem.model import SystemParams
from fluxem.solver import IntegratorConfig

hypothesis.settings.register_profile("default", max_examples=40, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=5, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=500, deadline=None)
hypothesis.settings.load_profile("default")

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def fig2_params():
    return SystemParams()


@pytest.fixture(scope="session")
def fig2_traj(fig2_params):
    return run_transfer(fig2_params, IntegratorConfig())


@pytest.fixture(scope="session")
def lossless_traj(fig2_params):
    return run_transfer(fig2_params.lossless(), IntegratorConfig())


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_density(rng, d):
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = m @ m.conj().T
    return rho / np.trace(rho)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
