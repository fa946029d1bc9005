import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


def random_nonpositive(rng, r_max=6, scale=0.3):
    """phi'' = (1, c_2, ..., c_R) with c_r <= 0, c_R < 0 and W'' > 0."""
    R = int(rng.integers(2, r_max + 1))
    tail = -rng.uniform(0.0, 1.0, R - 1)
    tail[-1] = min(tail[-1], -0.05)
    r = np.arange(2, R + 1)
    # keep W'' = 1 + sum r^2 c_r comfortably positive
    tail *= scale / max(np.sum(r**2 * -tail), 1e-12)
    return (1.0, *tail)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
