"""Density matrices, the named states used throughout, and structural decompositions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import linalg

STATE_TOL = 1e-10
# eigenvalues in [-POSITIVITY_TOL, 0) are treated as eigensolver noise
POSITIVITY_TOL = 1e-8


class InvalidStateError(ValueError):
    """A state failed one of its invariants; ``invariant`` names which one."""

    def __init__(self, invariant: str, message: str):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


@dataclass(frozen=True)
class PartitionSpec:
    dims: tuple[int, ...]
    labels: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims:
            raise InvalidStateError("partition", "at least one subsystem is required")
        if any(d < 2 for d in dims):
            raise InvalidStateError("partition", f"every subsystem dimension must be >= 2, got {dims}")
        object.__setattr__(self, "dims", dims)
        if self.labels is not None:
            labels = tuple(str(x) for x in self.labels)
            if len(labels) != len(dims):
                raise InvalidStateError("partition", "labels must match the number of subsystems")
            object.__setattr__(self, "labels", labels)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    def __len__(self) -> int:
        return len(self.dims)

    @classmethod
    def qubits(cls, n: int) -> "PartitionSpec":
        return cls((2,) * n)


def _as_partition(dims) -> PartitionSpec:
    return dims if isinstance(dims, PartitionSpec) else PartitionSpec(tuple(dims))


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix paired with a partition.

    Construction validates the invariants. Tiny negative eigenvalues (down to
    ``-1e-8``) are clipped to zero and the trace renormalised; anything more
    negative raises :class:`InvalidStateError`.
    """

    matrix: np.ndarray
    partition: PartitionSpec

    def __post_init__(self):
        partition = _as_partition(self.partition)
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidStateError("shape", f"density matrix must be square, got {m.shape}")
        if m.shape[0] != partition.total_dim:
            raise InvalidStateError(
                "partition", f"dims {partition.dims} do not match matrix dimension {m.shape[0]}"
            )
        herm = linalg.max_abs(m - m.conj().T)
        if herm > STATE_TOL:
            raise InvalidStateError("hermiticity", f"max |rho - rho^dag| = {herm:.3e}")
        m = 0.5 * (m + m.conj().T)
        tr = np.trace(m).real
        if abs(tr - 1.0) > STATE_TOL:
            raise InvalidStateError("trace", f"trace is {tr:.12g}, expected 1")
        w, v = np.linalg.eigh(m)
        if w[0] < -POSITIVITY_TOL:
            raise InvalidStateError("positivity", f"minimum eigenvalue {w[0]:.3e} < {-POSITIVITY_TOL:.0e}")
        if w[0] < 0:
            w = np.clip(w, 0.0, None)
            w = w / w.sum()
            m = (v * w) @ v.conj().T
            m = 0.5 * (m + m.conj().T)
        object.__setattr__(self, "matrix", _readonly(m))
        object.__setattr__(self, "partition", partition)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def dims(self) -> tuple[int, ...]:
        return self.partition.dims

    def reduced(self, keep) -> "DensityMatrix":
        keep = sorted(set(int(k) for k in keep))
        m = linalg.partial_trace(self.matrix, self.dims, keep)
        return DensityMatrix(m, PartitionSpec(tuple(self.dims[k] for k in keep)))

    def with_partition(self, dims) -> "DensityMatrix":
        return DensityMatrix(self.matrix, _as_partition(dims))

    def __repr__(self) -> str:
        return f"DensityMatrix(dims={self.dims})"


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray
    partition: PartitionSpec

    def __post_init__(self):
        partition = _as_partition(self.partition)
        a = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if a.size != partition.total_dim:
            raise InvalidStateError("partition", f"dims {partition.dims} do not match {a.size} amplitudes")
        norm = np.linalg.norm(a)
        if abs(norm - 1.0) > STATE_TOL:
            raise InvalidStateError("normalization", f"norm is {norm:.12g}, expected 1")
        object.__setattr__(self, "amplitudes", _readonly(a))
        object.__setattr__(self, "partition", partition)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.partition.dims


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    coefficients: np.ndarray
    left_basis: np.ndarray
    right_basis: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return np.einsum("k,ik,jk->ij", self.coefficients, self.left_basis, self.right_basis).reshape(-1)


def density_from_pure(psi: PureState) -> DensityMatrix:
    a = psi.amplitudes
    return DensityMatrix(np.outer(a, a.conj()), psi.partition)


def ket(bits: str, dims: Optional[Sequence[int]] = None) -> np.ndarray:
    """Computational basis vector, e.g. ``ket("0101")``."""
    digits = [int(b) for b in bits]
    dims = tuple(dims) if dims is not None else (2,) * len(digits)
    v = np.zeros(int(np.prod(dims)), dtype=complex)
    v[int(np.ravel_multi_index(digits, dims))] = 1.0
    return v


def ghz_state(n: int) -> PureState:
    if n < 2:
        raise ValueError(f"GHZ state needs at least 2 subsystems, got {n}")
    a = np.zeros(2**n, dtype=complex)
    a[0] = a[-1] = 1 / np.sqrt(2)
    return PureState(a, PartitionSpec.qubits(n))


def bell_state() -> PureState:
    return ghz_state(2)


def two_bell_state() -> PureState:
    """Two Bell pairs on qubits ordered (A1, A2, B1, B2), pairing A1-B1 and A2-B2."""
    phi = bell_state().amplitudes
    # phi_{A1 B1} (x) phi_{A2 B2} is in order (A1, B1, A2, B2); swap the middle factors
    t = np.kron(phi, phi).reshape(2, 2, 2, 2).transpose(0, 2, 1, 3)
    return PureState(t.reshape(-1), PartitionSpec.qubits(4))


def example_b_state() -> DensityMatrix:
    """Equal mixture of |00> and |1+>: separable but not classically correlated."""
    plus = np.array([1, 1]) / np.sqrt(2)
    a = ket("00")
    b = np.kron(ket("1"), plus)
    m = 0.5 * (np.outer(a, a.conj()) + np.outer(b, b.conj()))
    return DensityMatrix(m, PartitionSpec((2, 2)))


def _check_bases(bases, dims) -> list[np.ndarray]:
    if bases is None:
        return [np.eye(d, dtype=complex) for d in dims]
    bases = [np.asarray(b, dtype=complex) for b in bases]
    if len(bases) != len(dims):
        raise InvalidStateError("bases", f"expected {len(dims)} local bases, got {len(bases)}")
    for k, (b, d) in enumerate(zip(bases, dims)):
        if b.shape != (d, d):
            raise InvalidStateError("bases", f"basis {k} has shape {b.shape}, expected {(d, d)}")
        if not linalg.is_unitary(b, 1e-9):
            raise InvalidStateError("bases", f"basis {k} is not orthonormal")
    return bases


def maximally_correlated_state(sigma, bases=None, dims: Optional[Sequence[int]] = None) -> DensityMatrix:
    """State sum_ij sigma_ij |a_i b_i ... c_i><a_j b_j ... c_j|.

    ``dims`` defaults to the shapes of ``bases`` or, without bases, to two
    subsystems of dimension ``len(sigma)``.
    """
    sigma = np.asarray(sigma, dtype=complex)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise InvalidStateError("sigma", "sigma must be a square matrix")
    n = sigma.shape[0]
    if bases is not None:
        dims = tuple(np.asarray(b).shape[0] for b in bases)
    elif dims is None:
        dims = (max(n, 2), max(n, 2))
    dims = tuple(int(d) for d in dims)
    if n > min(dims):
        raise InvalidStateError("sigma", f"sigma of size {n} exceeds smallest local dimension {min(dims)}")
    _check_sigma(sigma)
    bases = _check_bases(bases, dims)
    vecs = np.stack([linalg.tensor_all(b[:, i] for b in bases) for i in range(n)], axis=1)
    return DensityMatrix(vecs @ sigma @ vecs.conj().T, PartitionSpec(dims))


def _check_sigma(sigma: np.ndarray) -> None:
    herm = linalg.max_abs(sigma - sigma.conj().T)
    if herm > STATE_TOL:
        raise InvalidStateError("hermiticity", f"sigma must satisfy sigma_ij = conj(sigma_ji) (error {herm:.3e})")
    tr = np.trace(sigma).real
    if abs(tr - 1) > STATE_TOL:
        raise InvalidStateError("trace", f"diagonal of sigma sums to {tr:.12g}, expected 1")
    wmin = np.linalg.eigvalsh(0.5 * (sigma + sigma.conj().T))[0]
    if wmin < -POSITIVITY_TOL:
        raise InvalidStateError("positivity", f"sigma has eigenvalue {wmin:.3e}")


def classical_state(probs, bases=None, dims: Optional[Sequence[int]] = None) -> DensityMatrix:
    """State diagonal in the product basis built from ``bases``.

    ``probs`` may be a flat vector (then ``dims`` or ``bases`` fixes the shape)
    or a tensor whose shape gives the local dimensions.
    """
    p = np.asarray(probs, dtype=float)
    if dims is None:
        if bases is not None:
            dims = tuple(np.asarray(b).shape[0] for b in bases)
        elif p.ndim > 1:
            dims = p.shape
        else:
            raise InvalidStateError("probs", "flat probabilities need dims or bases")
    dims = tuple(int(d) for d in dims)
    p = p.reshape(-1)
    if p.size != int(np.prod(dims)):
        raise InvalidStateError("probs", f"{p.size} probabilities do not match dims {dims}")
    if np.any(p < 0):
        raise InvalidStateError("probs", "probabilities must be nonnegative")
    if abs(p.sum() - 1) > 1e-12:
        raise InvalidStateError("probs", f"probabilities sum to {p.sum():.15g}, expected 1")
    u = linalg.tensor_all(_check_bases(bases, dims))
    return DensityMatrix((u * p) @ u.conj().T, PartitionSpec(dims))


def haar_unitary(dim: int, rng: np.random.Generator, size: Optional[int] = None) -> np.ndarray:
    """Haar-distributed unitary via QR of a Ginibre matrix with the R-diagonal phases removed.

    With ``size`` a stack of that many independent unitaries is returned.
    """
    shape = (dim, dim) if size is None else (size, dim, dim)
    z = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[..., None, :]


def random_density(dim: int, rank: int, seed: int, dims: Optional[Sequence[int]] = None) -> DensityMatrix:
    """Ginibre ensemble: rho = G G^dag / tr(G G^dag) with G a dim x rank complex Gaussian."""
    if not 1 <= rank <= dim:
        raise ValueError(f"rank must lie in [1, {dim}], got {rank}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    m = g @ g.conj().T
    m = m / np.trace(m).real
    return DensityMatrix(m, PartitionSpec(tuple(dims) if dims is not None else (dim,)))


def random_pure(dims: Sequence[int], seed: int) -> PureState:
    rng = np.random.default_rng(seed)
    d = int(np.prod(dims))
    a = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return PureState(a / np.linalg.norm(a), PartitionSpec(tuple(dims)))


def schmidt_decompose(psi: PureState, cut: int) -> SchmidtDecomposition:
    """Schmidt form across the cut between subsystems ``[0, cut)`` and ``[cut, n)``."""
    dims = psi.dims
    if not 0 < cut < len(dims):
        raise ValueError(f"cut must lie strictly between 0 and {len(dims)}, got {cut}")
    da = int(np.prod(dims[:cut]))
    db = int(np.prod(dims[cut:]))
    u, s, vh = np.linalg.svd(psi.amplitudes.reshape(da, db), full_matrices=False)
    return SchmidtDecomposition(s, u, vh.T)


def tensor_states(*states: DensityMatrix) -> DensityMatrix:
    m = linalg.tensor_all(s.matrix for s in states)
    dims = tuple(d for s in states for d in s.dims)
    return DensityMatrix(m, PartitionSpec(dims))


def apply_local_unitaries(rho: DensityMatrix, unitaries: Sequence) -> DensityMatrix:
    u = linalg.tensor_all(unitaries)
    if u.shape[0] != rho.dim:
        raise ValueError("local unitaries do not match the partition")
    return DensityMatrix(u @ rho.matrix @ u.conj().T, rho.partition)


def regroup(rho: DensityMatrix, groups: Sequence[Sequence[int]]) -> DensityMatrix:
    """Merge subsystems into coarser parties.

    ``groups`` lists, for each new party, the old subsystem indices it contains;
    e.g. ``[[0, 2], [1, 3]]`` on (A1, A2, B1, B2) gives parties (A1 B1)(A2 B2).
    """
    order = [int(i) for g in groups for i in g]
    if sorted(order) != list(range(len(rho.dims))):
        raise InvalidStateError("partition", f"groups {groups} must cover each subsystem exactly once")
    m = linalg.permute_subsystems(rho.matrix, rho.dims, order)
    dims = tuple(int(np.prod([rho.dims[i] for i in g])) for g in groups)
    return DensityMatrix(m, PartitionSpec(dims))


def named_state(name: str) -> DensityMatrix:
    """Resolve ``bell``, ``ghz:<n>``, ``two_bell`` or ``example_b``."""
    key = name.strip().lower()
    if key == "bell":
        return density_from_pure(bell_state())
    if key.startswith("ghz:"):
        try:
            n = int(key.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad GHZ size in {name!r}") from None
        return density_from_pure(ghz_state(n))
    if key == "two_bell":
        return density_from_pure(two_bell_state())
    if key == "example_b":
        return example_b_state()
    raise ValueError(f"unknown named state {name!r}")
