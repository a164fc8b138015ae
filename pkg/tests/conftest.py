import numpy as np
import pytest

from twoband.model import PureState

_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_log():
    """Collects one line per acceptance criterion for the terminal summary."""
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in _ACCEPTANCE_LINES:
        terminalreporter.write_line(line)


def random_state(rng, n_upper, n_lower):
    """Haar-random state on the full resonant subspace."""
    z = rng.standard_normal(n_upper + n_lower) + 1j * rng.standard_normal(n_upper + n_lower)
    return PureState(z / np.linalg.norm(z), n_upper)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
