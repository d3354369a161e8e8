import sys

import numpy as np
import pytest

from backflow import bounds as bd
from backflow.models import JAYNES_CUMMINGS, TWO_QUBIT, default_scenario
from backflow.states import make_rng


@pytest.fixture
def rng():
    return make_rng(20240611)


def random_hermitian(rng, dim):
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return 0.5 * (a + a.conj().T)


@pytest.fixture(scope="session")
def jc_scenario():
    return default_scenario(JAYNES_CUMMINGS)


@pytest.fixture(scope="session")
def tq_scenario():
    return default_scenario(TWO_QUBIT)


@pytest.fixture(scope="session")
def jc_traj(jc_scenario):
    return bd.evolve_pair(jc_scenario)


@pytest.fixture(scope="session")
def tq_traj(tq_scenario):
    return bd.evolve_pair(tq_scenario)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
