import numpy as np
import pytest

from qcentropy import linalg
from qcentropy.optimize import OptimizerConfig, brute_force_qc, qc_entropy
from qcentropy.optimize.oracle import OracleError, axis_basis, axis_grid
from qcentropy.states import classical_state, density_from_pure, example_b_state, ghz_state, random_density, tensor_states


def test_bell():
    assert brute_force_qc(density_from_pure(ghz_state(2))) == pytest.approx(1, abs=1e-6)


def test_product():
    rho = tensor_states(random_density(2, 1, 1), random_density(2, 1, 2))
    assert brute_force_qc(rho) == pytest.approx(0, abs=1e-6)


def test_classical_uniform_raw_minimum():
    # the oracle returns S^QC; its entropy minimum is S^VN + S^QC = 1 bit
    rho = classical_state([[0.5, 0], [0, 0.5]])
    assert brute_force_qc(rho) == pytest.approx(0, abs=1e-6)


def test_example_b():
    assert brute_force_qc(example_b_state()) == pytest.approx(0.5, abs=0.01)


def test_agrees_with_optimizer():
    cfg = OptimizerConfig(restarts=8)
    for seed in range(4):
        rho = random_density(4, 1 + seed, seed, dims=(2, 2))
        value, _ = qc_entropy(rho, cfg)
        assert brute_force_qc(rho, seed=seed) == pytest.approx(value, abs=0.01)


def test_deterministic():
    rho = random_density(4, 2, 3, dims=(2, 2))
    assert brute_force_qc(rho, seed=4) == brute_force_qc(rho, seed=4)


def test_haar_only_for_qutrits():
    rho = random_density(6, 2, 3, dims=(2, 3))
    value = brute_force_qc(rho, samples=500)
    assert value >= 0


def test_dimension_cap():
    with pytest.raises(OracleError):
        brute_force_qc(random_density(32, 1, 0, dims=(2,) * 5))


def test_axis_basis_is_unitary():
    theta, phi = np.meshgrid(np.linspace(0, np.pi, 5), np.linspace(0, 2 * np.pi, 5))
    for u in axis_basis(theta.ravel(), phi.ravel()):
        assert linalg.is_unitary(u, 1e-12)
    assert axis_grid(10).shape[0] == 100
