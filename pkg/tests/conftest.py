import numpy as np
import pytest

from dwpoles import kernels
from dwpoles.potential import DEFAULT_PARAMS, PotentialSpec, build_double_well

ACCEPTANCE_RESULTS = []


@pytest.fixture
def default_spec():
    return build_double_well(DEFAULT_PARAMS)


@pytest.fixture
def free_spec():
    return PotentialSpec()


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    return request.param


def random_spec(rng, max_segments=5, heights=(-2.0, 5.0), widths=(0.1, 1.5)):
    n = int(rng.integers(1, max_segments + 1))
    return PotentialSpec.from_widths(rng.uniform(*widths, n), rng.uniform(*heights, n))


def wrap_pi(d):
    """Signed distance modulo pi, in [-pi/2, pi/2)."""
    return (np.asarray(d) + np.pi / 2) % np.pi - np.pi / 2


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(line)
