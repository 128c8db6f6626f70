import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qcentropy import linalg
from qcentropy.states import haar_unitary

from conftest import seeds

PLUS = np.array([1, 1]) / np.sqrt(2)


def _random_matrix(seed, n):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def _random_hermitian(seed, n):
    a = _random_matrix(seed, n)
    return 0.5 * (a + a.conj().T)


class TestTensorProduct:
    def test_identities(self):
        assert linalg.allclose(linalg.tensor_product(np.eye(2), np.eye(2)), np.eye(4), 0)

    def test_diagonal_projectors(self):
        out = linalg.tensor_product(np.diag([1, 0]), np.diag([0, 1]))
        assert linalg.allclose(out, np.diag([0, 1, 0, 0]), 0)

    def test_zero_with_plus(self):
        out = linalg.tensor_product(np.diag([1, 0]), np.outer(PLUS, PLUS))
        expected = np.zeros((4, 4))
        expected[:2, :2] = 0.5
        assert linalg.allclose(out, expected, 1e-15)

    def test_tensor_all_needs_a_factor(self):
        with pytest.raises(linalg.LinalgError):
            linalg.tensor_all([])


class TestPartialTrace:
    def test_bell_marginal(self):
        bell = np.zeros((4, 4))
        bell[np.ix_([0, 3], [0, 3])] = 0.5
        assert linalg.allclose(linalg.partial_trace(bell, (2, 2), [0]), np.eye(2) / 2, 1e-15)

    def test_example_b_marginal(self):
        a = np.kron([1, 0], [1, 0])
        b = np.kron([0, 1], PLUS)
        rho = 0.5 * (np.outer(a, a) + np.outer(b, b))
        out = linalg.partial_trace(rho, (2, 2), [1])
        assert linalg.allclose(out, [[0.75, 0.25], [0.25, 0.25]], 1e-15)

    @given(seeds)
    def test_product_marginals(self, seed):
        a = _random_hermitian(seed, 2)
        b = _random_hermitian(seed + 1, 3)
        b /= np.trace(b)
        out = linalg.partial_trace(np.kron(a, b), (2, 3), [0])
        assert linalg.allclose(out, a, 1e-12)

    @given(seeds)
    def test_trace_preserved_and_composable(self, seed):
        m = _random_matrix(seed, 12)
        dims = (2, 3, 2)
        full = np.trace(m)
        for keep in ([0], [1], [2], [0, 2], [1, 2]):
            assert abs(np.trace(linalg.partial_trace(m, dims, keep)) - full) < 1e-10
        # tracing out 2 then 1 equals tracing out both at once
        step = linalg.partial_trace(linalg.partial_trace(m, dims, [0, 1]), (2, 3), [0])
        assert linalg.allclose(step, linalg.partial_trace(m, dims, [0]), 1e-10)

    def test_bad_inputs(self):
        with pytest.raises(linalg.LinalgError):
            linalg.partial_trace(np.eye(4), (2, 3), [0])
        with pytest.raises(linalg.LinalgError):
            linalg.partial_trace(np.eye(4), (2, 2), [])
        with pytest.raises(linalg.LinalgError):
            linalg.partial_trace(np.eye(4), (2, 2), [2])


class TestPermute:
    @given(seeds)
    def test_swap_matches_kron_order(self, seed):
        a, b = _random_matrix(seed, 2), _random_matrix(seed + 7, 3)
        out = linalg.permute_subsystems(np.kron(a, b), (2, 3), [1, 0])
        assert linalg.allclose(out, np.kron(b, a), 1e-12)

    def test_rejects_non_permutation(self):
        with pytest.raises(linalg.LinalgError):
            linalg.permute_subsystems(np.eye(4), (2, 2), [0, 0])


class TestEigendecomposition:
    def test_diagonal_sorted_descending(self):
        eig = linalg.hermitian_eigendecomposition(np.diag([0.25, 0.75]))
        assert np.allclose(eig.eigenvalues, [0.75, 0.25])

    def test_example_b_marginal_spectrum(self):
        eig = linalg.hermitian_eigendecomposition([[0.75, 0.25], [0.25, 0.25]])
        s = 1 / np.sqrt(2)
        assert np.allclose(eig.eigenvalues, [(1 + s) / 2, (1 - s) / 2], atol=1e-12)

    def test_pauli_x(self):
        eig = linalg.hermitian_eigendecomposition([[0, 1], [1, 0]])
        assert np.allclose(eig.eigenvalues, [1, -1])
        v = eig.eigenvectors
        assert abs(abs(v[:, 0] @ PLUS) - 1) < 1e-12
        assert abs(abs(v[:, 1] @ np.array([1, -1]) / np.sqrt(2)) - 1) < 1e-12

    def test_rejects_non_hermitian(self):
        with pytest.raises(linalg.LinalgError):
            linalg.hermitian_eigendecomposition([[0, 1], [0, 0]])

    @given(seeds, st.integers(1, 8))
    def test_reconstruction_and_unitarity(self, seed, n):
        h = _random_hermitian(seed, n)
        eig = linalg.hermitian_eigendecomposition(h)
        assert linalg.allclose(eig.reconstruct(), h, 1e-10)
        assert linalg.is_unitary(eig.eigenvectors, 1e-10)
        assert np.all(np.diff(eig.eigenvalues) <= 0)

    def test_deterministic_on_degenerate_input(self):
        a = linalg.hermitian_eigendecomposition(np.eye(3))
        b = linalg.hermitian_eigendecomposition(np.eye(3))
        assert np.array_equal(a.eigenvectors, b.eigenvectors)


class TestProjectors:
    def test_identity_column(self):
        assert linalg.allclose(linalg.projector_from_columns(np.eye(3), [0]), np.diag([1, 0, 0]), 0)

    def test_plus_column(self):
        h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
        assert linalg.allclose(linalg.projector_from_columns(h, [0]), 0.5 * np.ones((2, 2)), 1e-15)

    @given(seeds)
    def test_all_columns_give_identity(self, seed):
        u = haar_unitary(4, np.random.default_rng(seed))
        assert linalg.allclose(linalg.projector_from_columns(u, range(4)), np.eye(4), 1e-12)

    def test_rejects_non_orthonormal(self):
        with pytest.raises(linalg.LinalgError):
            linalg.projector_from_columns(np.ones((2, 2)), [0, 1])
