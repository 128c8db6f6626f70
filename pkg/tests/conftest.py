import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from qcentropy.states import PartitionSpec, random_density

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

seeds = st.integers(min_value=0, max_value=2**32 - 1)


@st.composite
def qubit_states(draw, min_qubits: int = 2, max_qubits: int = 3):
    """Random Ginibre states on 2-3 qubits, any rank."""
    n = draw(st.integers(min_qubits, max_qubits))
    dim = 2**n
    rank = draw(st.integers(1, dim))
    return random_density(dim, rank, draw(seeds), dims=(2,) * n)


@st.composite
def mixed_dim_states(draw):
    dims = draw(st.sampled_from([(2, 2), (2, 3), (3, 2), (3, 3), (2, 2, 2)]))
    dim = int(np.prod(dims))
    rank = draw(st.integers(1, dim))
    return random_density(dim, rank, draw(seeds), dims=dims)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def maximally_mixed(dims) -> "DensityMatrix":  # noqa: F821
    from qcentropy.states import DensityMatrix

    d = int(np.prod(dims))
    return DensityMatrix(np.eye(d) / d, PartitionSpec(tuple(dims)))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import ACCEPTANCE_LINES
    except ImportError:
        return
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
