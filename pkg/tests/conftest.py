"""Shared fixtures: small classical and quantum models with their usual free sets."""

import numpy as np
import pytest

from src.gpt.model import classical_model, quantum_model
from src.robustness.free_sets import diagonal_states, uniform_point


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def bit():
    return classical_model(2)


@pytest.fixture
def trit():
    return classical_model(3)


@pytest.fixture
def qubit():
    return quantum_model(2)


@pytest.fixture
def qutrit():
    return quantum_model(3)


@pytest.fixture
def incoherent_qubit(qubit):
    return diagonal_states(qubit)


@pytest.fixture
def incoherent_qutrit(qutrit):
    return diagonal_states(qutrit)


@pytest.fixture
def uniform_trit(trit):
    return uniform_point(trit)
