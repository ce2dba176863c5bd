import mpmath
import numpy as np
import pytest

from smallcell import ChannelParams, cell_load_pmf, tagged_cell_extra_load_pmf


def nb_pmf_oracle(k, ratio, c, dps=40):
    """High-precision per-cell load pmf, written directly from the gamma form."""
    with mpmath.workdps(dps):
        c, ratio = mpmath.mpf(c), mpmath.mpf(ratio)
        head = 3.5 ** c * mpmath.gamma(k + c) * ratio ** k
        return float(head / (mpmath.gamma(c) * mpmath.factorial(k) * (3.5 + ratio) ** (k + c)))


@pytest.fixture(scope="session")
def load10():
    return cell_load_pmf(10.0)


@pytest.fixture(scope="session")
def extra10():
    return tagged_cell_extra_load_pmf(10.0)


@pytest.fixture
def params():
    return ChannelParams(alpha=4.0, theta0=1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
