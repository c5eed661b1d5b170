import numpy as np
import pytest

from jointmeas import linalg
from jointmeas.operator_basis import basis_for_dimension, pauli_basis, qutrit_builtin


@pytest.fixture(params=linalg.available_backends())
def backend(request):
    prev = linalg.use_backend(request.param)
    yield request.param
    linalg.use_backend(prev)


@pytest.fixture(scope="session")
def qubit():
    return pauli_basis()


@pytest.fixture(scope="session")
def qutrit():
    return qutrit_builtin()


@pytest.fixture(scope="session")
def ququart():
    return basis_for_dimension(4)


def random_hermitian(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (a + a.conj().T)


def numpy_min_eig(stack):
    return np.linalg.eigvalsh(np.asarray(stack)).min(axis=-1)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
