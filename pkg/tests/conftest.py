import numpy as np
import pytest

from modalqm.contexts import context_from_observable

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)

ACCEPTANCE_LINES = []


@pytest.fixture
def pauli():
    return {"I": I2, "X": X, "Y": Y, "Z": Z}


@pytest.fixture
def zx_contexts():
    z, _ = context_from_observable(Z, "Z")
    x, _ = context_from_observable(X, "X")
    return z, x


@pytest.fixture
def y_context():
    return context_from_observable(Y, "Y")[0]


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
