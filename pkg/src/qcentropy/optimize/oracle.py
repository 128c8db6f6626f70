"""Brute-force S^QC by enumeration, independent of the compass search.

Haar-random local bases are scored in bulk. For partitions of at most two
qubits a deterministic grid over per-qubit measurement axes is added, followed
by a few rounds of local grid zooming around the best cells: near a pure
optimum the entropy has a p log p cusp, so a fixed 40 x 40 grid alone can sit
~0.02 bits above the minimum. The result is a minimum over explicitly scored
bases, so it bounds S^QC from above.
"""

from __future__ import annotations

import itertools

import numpy as np

from ..entropy import von_neumann_entropy
from ..states import DensityMatrix, haar_unitary

MAX_DIM = 16
GRID = 40
ZOOM_SEEDS = 8
ZOOM_POINTS = 7
ZOOM_ROUNDS = 14
ZOOM_FACTOR = 0.4
_CHUNK = 2048


class OracleError(ValueError):
    pass


def _entropy_rows(p: np.ndarray) -> np.ndarray:
    p = np.clip(p, 0.0, None)
    safe = np.where(p > 0, p, 1.0)
    return -np.sum(p * np.log2(safe), axis=-1)


def _outcome_entropies(m: np.ndarray, u: np.ndarray) -> np.ndarray:
    return _entropy_rows(np.einsum("nik,ij,njk->nk", u.conj(), m, u).real)


def _kron_rows(factors: list[np.ndarray]) -> np.ndarray:
    u = factors[0]
    for f in factors[1:]:
        n = u.shape[0]
        u = np.einsum("nij,nkl->nikjl", u, f).reshape(n, u.shape[1] * f.shape[1], -1)
    return u


def _haar_minimum(rho: DensityMatrix, samples: int, seed: int) -> float:
    rng = np.random.default_rng(seed)
    best = np.inf
    for start in range(0, samples, _CHUNK):
        n = min(_CHUNK, samples - start)
        u = _kron_rows([haar_unitary(d, rng, size=n) for d in rho.dims])
        best = min(best, float(_outcome_entropies(rho.matrix, u).min()))
    return best


def axis_basis(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Qubit bases {|n>, |-n>} for Bloch axes n(theta, phi); columns are the basis vectors."""
    c = np.cos(theta / 2)
    s = np.sin(theta / 2)
    e = np.exp(1j * phi)
    b = np.empty(np.shape(theta) + (2, 2), dtype=complex)
    b[..., 0, 0] = c
    b[..., 1, 0] = e * s
    b[..., 0, 1] = -e.conj() * s
    b[..., 1, 1] = c
    return b


def axis_grid(grid: int = GRID) -> np.ndarray:
    """(grid*grid, 2) polar/azimuthal angles; the poles are included, so the computational basis is on it."""
    theta = np.linspace(0.0, np.pi, grid)
    phi = np.linspace(0.0, 2 * np.pi, grid, endpoint=False)
    t, f = np.meshgrid(theta, phi, indexing="ij")
    return np.stack([t.reshape(-1), f.reshape(-1)], axis=1)


def _angle_entropies(m: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """Outcome entropy for rows of per-qubit angles (theta_1, phi_1, theta_2, phi_2, ...)."""
    q = angles.shape[1] // 2
    factors = [axis_basis(angles[:, 2 * k], angles[:, 2 * k + 1]) for k in range(q)]
    return _outcome_entropies(m, _kron_rows(factors))


def _grid_scores(rho: DensityMatrix, grid: int) -> tuple[np.ndarray, np.ndarray]:
    axes = axis_grid(grid)
    bases = axis_basis(axes[:, 0], axes[:, 1])
    if len(rho.dims) == 1:
        return axes, _outcome_entropies(rho.matrix, bases)
    t = rho.matrix.reshape(2, 2, 2, 2)
    # conditional operators on qubit B after projecting qubit A onto each grid vector
    x = np.einsum("gik,ijml,gmk->gkjl", bases.conj(), t, bases)
    # <b_hn| x |b_hn> = sum_jl x_jl conj(b_j) b_l, one matmul over all pairs
    outer = np.einsum("hjn,hln->hnjl", bases.conj(), bases).reshape(-1, 4)
    p = (x.reshape(-1, 4) @ outer.T).real.reshape(x.shape[0], 2, -1, 2)
    scores = _entropy_rows(np.transpose(p, (0, 2, 1, 3)).reshape(x.shape[0], -1, 4))
    g = axes.shape[0]
    ia, ib = np.meshgrid(np.arange(g), np.arange(g), indexing="ij")
    angles = np.concatenate([axes[ia.reshape(-1)], axes[ib.reshape(-1)]], axis=1)
    return angles, scores.reshape(-1)


def _zoom(m: np.ndarray, start: np.ndarray, width: np.ndarray) -> float:
    offsets = np.array(list(itertools.product(np.linspace(-1.0, 1.0, ZOOM_POINTS), repeat=start.size)))
    centre, best = start, float(_angle_entropies(m, start[None, :])[0])
    for _ in range(ZOOM_ROUNDS):
        cand = centre + offsets * width
        f = _angle_entropies(m, cand)
        k = int(np.argmin(f))
        if f[k] < best:
            centre, best = cand[k], float(f[k])
        width = width * ZOOM_FACTOR
    return best


def _grid_minimum(rho: DensityMatrix, grid: int) -> float:
    angles, scores = _grid_scores(rho, grid)
    best = float(scores.min())
    spacing = np.tile([np.pi / (grid - 1), 2 * np.pi / grid], len(rho.dims))
    top = np.argpartition(scores, ZOOM_SEEDS)[:ZOOM_SEEDS]
    for k in top[np.lexsort((top, scores[top]))]:
        best = min(best, _zoom(rho.matrix, angles[k], spacing))
    return best


def brute_force_qc(rho: DensityMatrix, samples: int = 10_000, seed: int = 0, grid: int = GRID) -> float:
    """min over sampled (and, for <= 2 qubits, gridded) local bases of the outcome entropy, minus S^VN."""
    if rho.dim > MAX_DIM:
        raise OracleError(f"brute force is limited to total dimension {MAX_DIM}, got {rho.dim}")
    best = _haar_minimum(rho, samples, seed) if samples > 0 else np.inf
    if all(d == 2 for d in rho.dims) and len(rho.dims) <= 2 and grid > 1:
        best = min(best, _grid_minimum(rho, grid))
    return best - von_neumann_entropy(rho)
