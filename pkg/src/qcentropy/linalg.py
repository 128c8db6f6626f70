"""Dense complex linear algebra used by every entropy formula.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Everything here is
a pure function; nothing mutates its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

HERMITICITY_TOL = 1e-10
ORTHONORMALITY_TOL = 1e-10
# eigenvalues closer than this are treated as a tie when ordering eigenvectors
_TIE_TOL = 1e-12


class LinalgError(ValueError):
    """Raised for malformed inputs to the matrix kernel."""


class EigenConvergenceError(LinalgError):
    pass


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """Eigenvalues in descending order with the matching unitary of eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(m) -> np.ndarray:
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise LinalgError(f"expected a 2-d matrix, got shape {arr.shape}")
    return arr


def allclose(a, b, atol: float) -> bool:
    """Entrywise comparison with an explicit absolute tolerance (no relative part)."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        return False
    return bool(np.all(np.abs(a - b) <= atol))


def max_abs(m) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m))) if m.size else 0.0


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product; block order follows argument order."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def tensor_all(mats: Iterable) -> np.ndarray:
    mats = list(mats)
    if not mats:
        raise LinalgError("tensor_all needs at least one factor")
    return reduce(tensor_product, mats)


def _check_dims(n: int, dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise LinalgError(f"subsystem dimensions must be positive, got {dims}")
    if int(np.prod(dims)) != n:
        raise LinalgError(f"dims {dims} multiply to {int(np.prod(dims))}, matrix has dimension {n}")
    return dims


def partial_trace(m, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Reduced matrix on the subsystems in ``keep`` (returned in ascending index order).

    >>> bell = np.zeros((4, 4)); bell[np.ix_([0, 3], [0, 3])] = 0.5
    >>> partial_trace(bell, (2, 2), [0]).real
    array([[0.5, 0. ],
           [0. , 0.5]])
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise LinalgError("partial_trace needs a square matrix")
    dims = _check_dims(m.shape[0], dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise LinalgError("keep set must be nonempty")
    n = len(dims)
    if keep[0] < 0 or keep[-1] >= n:
        raise LinalgError(f"keep indices {keep} out of range for {n} subsystems")
    drop = [i for i in range(n) if i not in keep]

    t = m.reshape(dims + dims)
    # bring (kept rows, dropped rows, kept cols, dropped cols) together then trace dropped
    perm = keep + drop + [n + i for i in keep] + [n + i for i in drop]
    t = np.transpose(t, perm)
    dk = int(np.prod([dims[i] for i in keep]))
    dd = int(np.prod([dims[i] for i in drop])) if drop else 1
    t = t.reshape(dk, dd, dk, dd)
    return np.einsum("ajbj->ab", t)


def permute_subsystems(m, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors of a square matrix so that new factor k is old factor ``order[k]``."""
    m = as_matrix(m)
    dims = _check_dims(m.shape[0], dims)
    order = [int(i) for i in order]
    if sorted(order) != list(range(len(dims))):
        raise LinalgError(f"{order} is not a permutation of {len(dims)} subsystems")
    n = len(dims)
    t = m.reshape(dims + dims)
    t = np.transpose(t, order + [n + i for i in order])
    return t.reshape(m.shape)


def _fix_phase(v: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Rotate each column so its first non-negligible entry is real positive."""
    v = v.copy()
    for k in range(v.shape[1]):
        col = v[:, k]
        nz = np.flatnonzero(np.abs(col) > tol)
        if nz.size:
            lead = col[nz[0]]
            v[:, k] = col * (abs(lead) / lead)
    return v


def _lex_key(col: np.ndarray) -> tuple:
    # rounding keeps the ordering stable against last-bit noise
    return tuple(x for z in np.round(col, 12) for x in (z.real, z.imag))


def hermitian_eigendecomposition(h, hermiticity_tol: float = HERMITICITY_TOL) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix with a deterministic convention.

    Eigenvalues are returned in descending order. Each eigenvector is phase-fixed
    so its first nonzero entry is real and positive. Within a group of tied
    eigenvalues, vectors are ordered by descending lexicographic comparison of
    their (real, imag) entries, so the identity yields the standard basis in order.
    """
    h = as_matrix(h)
    if h.shape[0] != h.shape[1]:
        raise LinalgError("eigendecomposition needs a square matrix")
    err = max_abs(h - h.conj().T)
    if err > hermiticity_tol:
        raise LinalgError(f"matrix is not Hermitian: max |h - h^dag| = {err:.3e} > {hermiticity_tol:.1e}")
    h = 0.5 * (h + h.conj().T)
    try:
        w, v = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise EigenConvergenceError(str(exc)) from exc

    w = w[::-1]
    v = _fix_phase(v[:, ::-1])

    # tie-break clusters of equal eigenvalues
    order: list[int] = []
    start = 0
    n = len(w)
    while start < n:
        stop = start + 1
        while stop < n and abs(w[stop - 1] - w[stop]) <= _TIE_TOL:
            stop += 1
        block = list(range(start, stop))
        if len(block) > 1:
            block.sort(key=lambda k: _lex_key(v[:, k]), reverse=True)
        order.extend(block)
        start = stop
    w = w[order]
    v = v[:, order]
    w.setflags(write=False)
    v.setflags(write=False)
    return EigenDecomposition(w, v)


def projector_from_columns(u, columns: Iterable[int], tol: float = ORTHONORMALITY_TOL) -> np.ndarray:
    """Orthogonal projector onto the span of the selected columns of ``u``."""
    u = as_matrix(u)
    cols = sorted(set(int(c) for c in columns))
    if not cols:
        raise LinalgError("column set must be nonempty")
    if cols[0] < 0 or cols[-1] >= u.shape[1]:
        raise LinalgError(f"column indices {cols} out of range")
    v = u[:, cols]
    gram = v.conj().T @ v
    err = max_abs(gram - np.eye(len(cols)))
    if err > tol:
        raise LinalgError(f"selected columns are not orthonormal (max error {err:.3e})")
    return v @ v.conj().T


def is_unitary(u, tol: float = 1e-9) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return max_abs(u.conj().T @ u - np.eye(u.shape[0])) <= tol


def matrix_function_hermitian(h, fn) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix through its spectrum."""
    w, v = np.linalg.eigh(0.5 * (as_matrix(h) + as_matrix(h).conj().T))
    return (v * fn(w)) @ v.conj().T
