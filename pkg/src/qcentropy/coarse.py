"""Coarse-grainings: sets of orthogonal projectors summing to the identity.

Projectors are stored as dense matrices so macrostates of any volume are
representable, not only rank-1 ones.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .states import DensityMatrix, PartitionSpec, haar_unitary

CG_TOL = 1e-10
DEGENERACY_TOL = 1e-8


class InvalidCoarseGrainingError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CoarseGraining:
    projectors: tuple[np.ndarray, ...]
    dim: int

    def __post_init__(self):
        projs = []
        for p in self.projectors:
            p = np.array(p, dtype=complex)
            if p.shape != (self.dim, self.dim):
                raise InvalidCoarseGrainingError(f"projector shape {p.shape} does not match dimension {self.dim}")
            p.setflags(write=False)
            projs.append(p)
        if not projs:
            raise InvalidCoarseGrainingError("a coarse-graining needs at least one projector")
        object.__setattr__(self, "projectors", tuple(projs))

    def __len__(self) -> int:
        return len(self.projectors)

    @property
    def ranks(self) -> tuple[int, ...]:
        return tuple(int(round(np.trace(p).real)) for p in self.projectors)

    @classmethod
    def from_projectors(cls, projectors: Sequence) -> "CoarseGraining":
        projectors = [np.asarray(p, dtype=complex) for p in projectors]
        return cls(tuple(projectors), projectors[0].shape[0])

    def conjugated(self, u: np.ndarray) -> "CoarseGraining":
        """The coarse-graining {U P U^dag}."""
        u = np.asarray(u, dtype=complex)
        return CoarseGraining(tuple(u @ p @ u.conj().T for p in self.projectors), self.dim)


@dataclass(frozen=True)
class Validation:
    """Outcome of :func:`validate`; the ``*_error`` fields hold the worst violations."""

    hermitian_error: float
    orthogonality_error: float
    idempotency_error: float
    completeness_error: float
    tol: float

    @property
    def hermitian(self) -> bool:
        return self.hermitian_error <= self.tol

    @property
    def orthogonal(self) -> bool:
        return self.orthogonality_error <= self.tol

    @property
    def idempotent(self) -> bool:
        return self.idempotency_error <= self.tol

    @property
    def complete(self) -> bool:
        return self.completeness_error <= self.tol

    @property
    def passed(self) -> bool:
        return self.hermitian and self.orthogonal and self.idempotent and self.complete

    def __bool__(self) -> bool:
        return self.passed

    def failures(self) -> list[str]:
        names = ("hermitian", "orthogonal", "idempotent", "complete")
        return [n for n in names if not getattr(self, n)]


def validate(cg: CoarseGraining, tol: float = CG_TOL) -> Validation:
    projs = cg.projectors
    herm = max(linalg.max_abs(p - p.conj().T) for p in projs)
    idem = max(linalg.max_abs(p @ p - p) for p in projs)
    orth = 0.0
    for i, j in itertools.combinations(range(len(projs)), 2):
        orth = max(orth, linalg.max_abs(projs[i] @ projs[j]))
    comp = linalg.max_abs(sum(projs) - np.eye(cg.dim))
    return Validation(herm, orth, idem, comp, tol)


def require_valid(cg: CoarseGraining, tol: float = CG_TOL) -> None:
    v = validate(cg, tol)
    if not v:
        raise InvalidCoarseGrainingError(f"coarse-graining violates: {', '.join(v.failures())}")


def computational_cg(dim: int) -> CoarseGraining:
    eye = np.eye(dim, dtype=complex)
    return CoarseGraining(tuple(np.outer(eye[k], eye[k]) for k in range(dim)), dim)


def trivial_cg(dim: int) -> CoarseGraining:
    return CoarseGraining((np.eye(dim, dtype=complex),), dim)


def basis_cg(u) -> CoarseGraining:
    """Rank-1 projectors onto the columns of a unitary."""
    u = np.asarray(u, dtype=complex)
    if not linalg.is_unitary(u, 1e-9):
        raise InvalidCoarseGrainingError("basis matrix is not unitary")
    return CoarseGraining(tuple(np.outer(u[:, k], u[:, k].conj()) for k in range(u.shape[1])), u.shape[0])


@dataclass(frozen=True, eq=False)
class LocalCoarseGraining:
    factors: tuple[CoarseGraining, ...]
    partition: PartitionSpec

    def __post_init__(self):
        factors = tuple(self.factors)
        partition = self.partition if isinstance(self.partition, PartitionSpec) else PartitionSpec(tuple(self.partition))
        if len(factors) != len(partition.dims):
            raise InvalidCoarseGrainingError(
                f"{len(factors)} factors given for {len(partition.dims)} subsystems"
            )
        for k, (f, d) in enumerate(zip(factors, partition.dims)):
            if f.dim != d:
                raise InvalidCoarseGrainingError(f"factor {k} acts on dimension {f.dim}, subsystem has {d}")
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "partition", partition)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(f) for f in self.factors)

    @classmethod
    def computational(cls, dims: Sequence[int]) -> "LocalCoarseGraining":
        return cls(tuple(computational_cg(d) for d in dims), PartitionSpec(tuple(dims)))


@dataclass(frozen=True, eq=False)
class LocalBasisPoint:
    """One unitary per subsystem; the columns define a rank-1 local coarse-graining."""

    unitaries: tuple[np.ndarray, ...]

    def __post_init__(self):
        us = []
        for k, u in enumerate(self.unitaries):
            u = np.array(u, dtype=complex)
            if not linalg.is_unitary(u, 1e-9):
                raise InvalidCoarseGrainingError(f"factor {k} is not unitary within 1e-9")
            u.setflags(write=False)
            us.append(u)
        object.__setattr__(self, "unitaries", tuple(us))

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(u.shape[0] for u in self.unitaries)

    def full_unitary(self) -> np.ndarray:
        return linalg.tensor_all(self.unitaries)

    @classmethod
    def identity(cls, dims: Sequence[int]) -> "LocalBasisPoint":
        return cls(tuple(np.eye(d, dtype=complex) for d in dims))


def product_cg(local: LocalCoarseGraining) -> CoarseGraining:
    """All tensor products of factor projectors, lexicographic in the factor indices."""
    for f in local.factors:
        require_valid(f)
    projs = tuple(
        linalg.tensor_all(combo) for combo in itertools.product(*(f.projectors for f in local.factors))
    )
    return CoarseGraining(projs, local.partition.total_dim)


def from_basis_point(p: LocalBasisPoint) -> LocalCoarseGraining:
    return LocalCoarseGraining(tuple(basis_cg(u) for u in p.unitaries), PartitionSpec(p.dims))


def _cluster(values: np.ndarray, tol: float) -> list[list[int]]:
    """Group indices of descending ``values`` whose consecutive gaps are within ``tol``."""
    groups: list[list[int]] = [[0]]
    for k in range(1, len(values)):
        if abs(values[k - 1] - values[k]) <= tol:
            groups[-1].append(k)
        else:
            groups.append([k])
    return groups


def eigenbasis_cg(rho, degeneracy_tol: float = DEGENERACY_TOL) -> CoarseGraining:
    """Eigenspaces of ``rho`` as macrostates; near-equal eigenvalues share a projector."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    eig = linalg.hermitian_eigendecomposition(m)
    projs = tuple(
        linalg.projector_from_columns(eig.eigenvectors, g) for g in _cluster(eig.eigenvalues, degeneracy_tol)
    )
    return CoarseGraining(projs, m.shape[0])


def refine_to_rank1(cg: CoarseGraining) -> CoarseGraining:
    """Split every projector into rank-1 projectors onto an orthonormal basis of its range."""
    require_valid(cg)
    out = []
    for p in cg.projectors:
        eig = linalg.hermitian_eigendecomposition(p)
        rank = int(round(np.trace(p).real))
        v = eig.eigenvectors
        out.extend(np.outer(v[:, k], v[:, k].conj()) for k in range(rank))
    return CoarseGraining(tuple(out), cg.dim)


def dephase(rho: DensityMatrix, p: LocalBasisPoint) -> DensityMatrix:
    """sum_k Pi_k rho Pi_k over the rank-1 product projectors of ``p``."""
    if p.dims != rho.dims:
        raise InvalidCoarseGrainingError(f"basis point dims {p.dims} do not match state dims {rho.dims}")
    u = p.full_unitary()
    diag = np.einsum("ik,ij,jk->k", u.conj(), rho.matrix, u).real
    return DensityMatrix((u * diag) @ u.conj().T, rho.partition)


def random_coarse_graining(dim: int, rng: np.random.Generator, n_blocks: int | None = None) -> CoarseGraining:
    """Haar-random basis grouped into ``n_blocks`` macrostates of random sizes."""
    u = haar_unitary(dim, rng)
    if n_blocks is None:
        n_blocks = int(rng.integers(1, dim + 1))
    cuts = np.sort(rng.choice(np.arange(1, dim), size=n_blocks - 1, replace=False)) if n_blocks > 1 else []
    bounds = [0, *cuts, dim]
    return CoarseGraining(
        tuple(linalg.projector_from_columns(u, range(a, b)) for a, b in zip(bounds[:-1], bounds[1:])), dim
    )


def random_local_cg(dims: Sequence[int], rng: np.random.Generator) -> LocalCoarseGraining:
    return LocalCoarseGraining(tuple(random_coarse_graining(d, rng) for d in dims), PartitionSpec(tuple(dims)))
