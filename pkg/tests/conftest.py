import math

import numpy as np
import pytest
from hypothesis import strategies as st

from casimir_piston import BoundaryUnitary

angles = st.floats(-2 * math.pi, 2 * math.pi, allow_nan=False)


@st.composite
def unit_vectors(draw):
    v = draw(st.lists(st.floats(-1, 1, allow_nan=False), min_size=3, max_size=3))
    n = math.sqrt(sum(x * x for x in v))
    if n < 1e-3:
        return (0.0, 0.0, 1.0)
    return tuple(x / n for x in v)


@st.composite
def unitaries(draw):
    return BoundaryUnitary(draw(angles), draw(angles), draw(unit_vectors()))


def random_unitary(rng, admissible_wall=False):
    """Random unitary; with ``admissible_wall`` the half-angle sums lie in [0, pi]."""
    v = rng.normal(size=3)
    v /= np.linalg.norm(v)
    if admissible_wall:
        # kappa = -tan((theta +- gamma)/2) <= 0 for both signs
        s, d = rng.uniform(0.05, math.pi - 0.05, size=2)
        return BoundaryUnitary(0.5 * (s + d), 0.5 * (s - d), tuple(v))
    return BoundaryUnitary(rng.uniform(-math.pi, math.pi), rng.uniform(-math.pi, math.pi), tuple(v))


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


# ---------------------------------------------------------------- acceptance report

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
