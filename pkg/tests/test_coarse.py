import numpy as np
import pytest
from hypothesis import given

from qcentropy import linalg
from qcentropy.coarse import (
    CoarseGraining,
    InvalidCoarseGrainingError,
    LocalBasisPoint,
    LocalCoarseGraining,
    basis_cg,
    computational_cg,
    dephase,
    eigenbasis_cg,
    from_basis_point,
    product_cg,
    random_coarse_graining,
    random_local_cg,
    refine_to_rank1,
    require_valid,
    trivial_cg,
    validate,
)
from qcentropy.entropy import observational_entropy, von_neumann_entropy
from qcentropy.states import PartitionSpec, classical_state, density_from_pure, ghz_state, haar_unitary

from conftest import maximally_mixed, qubit_states, seeds

HADAMARD = np.array([[1, 1], [1, -1]]) / np.sqrt(2)


def _bell():
    return density_from_pure(ghz_state(2))


class TestValidate:
    def test_computational_passes(self):
        assert validate(computational_cg(4))

    def test_duplicate_projector_fails(self):
        p = np.diag([1, 0])
        v = validate(CoarseGraining.from_projectors([p, p]))
        assert not v
        assert set(v.failures()) == {"orthogonal", "complete"}

    @given(seeds)
    def test_projector_and_complement(self, seed):
        u = haar_unitary(4, np.random.default_rng(seed))
        p = linalg.projector_from_columns(u, [0, 1])
        assert validate(CoarseGraining.from_projectors([p, np.eye(4) - p]))

    def test_non_idempotent(self):
        v = validate(CoarseGraining.from_projectors([np.eye(2) / 2, np.eye(2) / 2]))
        assert not v.idempotent

    def test_require_valid_raises(self):
        with pytest.raises(InvalidCoarseGrainingError):
            require_valid(CoarseGraining.from_projectors([np.diag([1, 0])]))

    def test_shape_mismatch(self):
        with pytest.raises(InvalidCoarseGrainingError):
            CoarseGraining((np.eye(2),), 3)


class TestProduct:
    def test_two_computational_qubits(self):
        cg = product_cg(LocalCoarseGraining.computational((2, 2)))
        assert len(cg) == 4 and cg.ranks == (1, 1, 1, 1)
        assert validate(cg)

    def test_trivial_factors(self):
        local = LocalCoarseGraining((trivial_cg(2), trivial_cg(2)), PartitionSpec((2, 2)))
        cg = product_cg(local)
        assert len(cg) == 1 and linalg.allclose(cg.projectors[0], np.eye(4), 0)

    def test_mixed_factors(self):
        pm = basis_cg(HADAMARD)
        local = LocalCoarseGraining((pm, computational_cg(2)), PartitionSpec((2, 2)))
        assert product_cg(local).ranks == (1, 1, 1, 1)

    def test_factor_dims_checked(self):
        with pytest.raises(InvalidCoarseGrainingError):
            LocalCoarseGraining((computational_cg(3), computational_cg(2)), PartitionSpec((2, 2)))

    @given(seeds)
    def test_random_local_is_valid(self, seed):
        local = random_local_cg((2, 3), np.random.default_rng(seed))
        assert validate(product_cg(local))


class TestBasisPoint:
    def test_identity_is_computational(self):
        local = from_basis_point(LocalBasisPoint.identity((2, 2)))
        for f in local.factors:
            assert all(linalg.allclose(a, b, 0) for a, b in zip(f.projectors, computational_cg(2).projectors))

    def test_hadamard_gives_plus_minus(self):
        local = from_basis_point(LocalBasisPoint((HADAMARD, np.eye(2))))
        plus, minus = local.factors[0].projectors
        assert linalg.allclose(plus, 0.5 * np.ones((2, 2)), 1e-15)
        assert linalg.allclose(minus, 0.5 * np.array([[1, -1], [-1, 1]]), 1e-15)

    @given(seeds)
    def test_product_is_valid(self, seed):
        rng = np.random.default_rng(seed)
        p = LocalBasisPoint((haar_unitary(2, rng), haar_unitary(3, rng)))
        assert validate(product_cg(from_basis_point(p)))

    def test_rejects_non_unitary(self):
        with pytest.raises(InvalidCoarseGrainingError):
            LocalBasisPoint((np.ones((2, 2)),))


class TestEigenbasis:
    def test_maximally_mixed_is_one_block(self):
        cg = eigenbasis_cg(maximally_mixed((2,)))
        assert len(cg) == 1 and linalg.allclose(cg.projectors[0], np.eye(2), 1e-12)

    def test_nondegenerate(self):
        cg = eigenbasis_cg(np.diag([0.75, 0.25]))
        assert cg.ranks == (1, 1)

    def test_bell_ranks(self):
        assert sorted(eigenbasis_cg(_bell()).ranks) == [1, 3]


class TestRefine:
    def test_identity_splits(self):
        cg = refine_to_rank1(trivial_cg(2))
        assert cg.ranks == (1, 1) and validate(cg)

    def test_rank_one_unchanged(self):
        cg = computational_cg(3)
        out = refine_to_rank1(cg)
        for a, b in zip(cg.projectors, out.projectors):
            assert linalg.allclose(a, b, 1e-12)

    @given(qubit_states(), seeds)
    def test_refinement_never_raises_entropy(self, rho, seed):
        cg = random_coarse_graining(rho.dim, np.random.default_rng(seed))
        assert observational_entropy(rho, refine_to_rank1(cg)) <= observational_entropy(rho, cg) + 1e-9


class TestDephase:
    def test_classical_state_unchanged(self, rng):
        bases = [haar_unitary(2, rng), haar_unitary(2, rng)]
        rho = classical_state([0.1, 0.2, 0.3, 0.4], bases=bases)
        out = dephase(rho, LocalBasisPoint(tuple(bases)))
        assert linalg.max_abs(out.matrix - rho.matrix) < 1e-10

    def test_bell_in_computational(self):
        out = dephase(_bell(), LocalBasisPoint.identity((2, 2)))
        assert linalg.allclose(out.matrix, np.diag([0.5, 0, 0, 0.5]), 1e-15)

    @given(qubit_states(), seeds)
    def test_entropy_equals_observational(self, rho, seed):
        rng = np.random.default_rng(seed)
        p = LocalBasisPoint(tuple(haar_unitary(d, rng) for d in rho.dims))
        lhs = von_neumann_entropy(dephase(rho, p))
        rhs = observational_entropy(rho, product_cg(from_basis_point(p)))
        assert abs(lhs - rhs) < 1e-9

    def test_dims_checked(self):
        with pytest.raises(InvalidCoarseGrainingError):
            dephase(_bell(), LocalBasisPoint.identity((4,)))


class TestConjugation:
    @given(seeds)
    def test_conjugated_stays_valid(self, seed):
        rng = np.random.default_rng(seed)
        cg = random_coarse_graining(4, rng)
        assert validate(cg.conjugated(haar_unitary(4, rng)))
