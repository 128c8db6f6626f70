"""Parameterisation of rank-1 local coarse-grainings and batched objectives over it.

A search point holds, for every subsystem of dimension d, d*d real numbers that
assemble a Hermitian generator H; the local unitary is exp(iH) and its columns
are the measurement basis. Functions accept batches of parameter vectors of
shape (batch, n_params).
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy.linalg import schur

from ..coarse import LocalBasisPoint
from ..states import DensityMatrix


class ParameterError(ValueError):
    pass


def _hermitian_from_params(params: np.ndarray, dim: int) -> np.ndarray:
    """Batch of Hermitian matrices: diagonal first, then (re, im) of the upper triangle row by row."""
    lead = params.shape[:-1]
    h = np.zeros(lead + (dim, dim), dtype=complex)
    idx = np.arange(dim)
    h[..., idx, idx] = params[..., :dim]
    iu, ju = np.triu_indices(dim, 1)
    off = params[..., dim::2] + 1j * params[..., dim + 1 :: 2]
    h[..., iu, ju] = off
    h[..., ju, iu] = off.conj()
    return h


def _qubit_unitaries(params: np.ndarray) -> np.ndarray:
    # exp(iH) = e^{i a0} (cos|a| + i sin|a|/|a| (H - a0)) for H = a0 + a.sigma
    a0 = 0.5 * (params[..., 0] + params[..., 1])
    az = 0.5 * (params[..., 0] - params[..., 1])
    c = params[..., 2] + 1j * params[..., 3]
    norm = np.sqrt(az * az + (c * c.conj()).real)
    cs = np.cos(norm)
    sn = np.sinc(norm / np.pi)
    ph = np.exp(1j * a0)
    u = np.empty(params.shape[:-1] + (2, 2), dtype=complex)
    u[..., 0, 0] = ph * (cs + 1j * sn * az)
    u[..., 1, 1] = ph * (cs - 1j * sn * az)
    u[..., 0, 1] = ph * 1j * sn * c
    u[..., 1, 0] = ph * 1j * sn * c.conj()
    return u


def unitaries_from_params(params: np.ndarray, dim: int) -> np.ndarray:
    """exp(iH) for a batch of generators (any leading batch shape)."""
    params = np.asarray(params, dtype=float)
    if params.ndim == 1:
        params = params[None, :]
    if params.shape[-1] != dim * dim:
        raise ParameterError(f"need {dim * dim} parameters for dimension {dim}, got {params.shape[-1]}")
    if dim == 2:
        return _qubit_unitaries(params)
    w, v = np.linalg.eigh(_hermitian_from_params(params, dim))
    return (v * np.exp(1j * w)[..., None, :]) @ np.conj(np.swapaxes(v, -1, -2))


def unitary_from_params(params, dim: int) -> np.ndarray:
    """Single unitary exp(iH); ``params`` has length dim**2."""
    params = np.asarray(params, dtype=float).reshape(-1)
    return unitaries_from_params(params[None, :], dim)[0]


def params_from_unitary(u) -> np.ndarray:
    """Chart parameters of a unitary: H = -i log U with eigenphases in (-pi, pi].

    Uses the complex Schur form, which for a normal matrix is diagonal with a
    unitary Z, so degenerate eigenphases cause no trouble.
    """
    u = np.asarray(u, dtype=complex)
    d = u.shape[0]
    t, z = schur(u, output="complex")
    h = (z * np.angle(np.diagonal(t))) @ z.conj().T
    h = 0.5 * (h + h.conj().T)
    iu, ju = np.triu_indices(d, 1)
    off = h[iu, ju]
    pairs = np.stack([off.real, off.imag], axis=1).reshape(-1)
    return np.concatenate([np.diagonal(h).real, pairs])


def _batched_kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    lead = a.shape[:-2]
    da, db = a.shape[-1], b.shape[-1]
    return np.einsum("...ij,...kl->...ikjl", a, b).reshape(lead + (da * db, da * db))


def _shannon_rows(p: np.ndarray) -> np.ndarray:
    safe = np.where(p > 0, p, 1.0)
    return -np.sum(p * np.log2(safe), axis=-1)


class Landscape:
    """Local-basis landscape for one state and partition.

    Objectives take either chart parameters of shape (batch, n_params) or a
    list of per-subsystem unitary stacks of shape (batch, d, d). Besides
    whole-point evaluation it supports block evaluation used by the search:
    with every subsystem except ``x`` held fixed, :meth:`environment` contracts
    the state with the fixed unitaries once, after which trial unitaries for
    subsystem ``x`` cost only a d x d contraction each.
    """

    def __init__(self, rho: DensityMatrix):
        self.rho = rho
        self.matrix = np.ascontiguousarray(rho.matrix)
        self.dims = tuple(rho.dims)
        sizes = [d * d for d in self.dims]
        self.offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
        self.n_params = int(self.offsets[-1])
        self.blocks = [(int(self.offsets[k]), int(self.offsets[k + 1])) for k in range(len(self.dims))]

    def split(self, params: np.ndarray) -> list[np.ndarray]:
        return [params[..., a:b] for a, b in self.blocks]

    def local_unitaries(self, params: np.ndarray) -> list[np.ndarray]:
        params = np.atleast_2d(params)
        if params.shape[-1] != self.n_params:
            raise ParameterError(f"expected {self.n_params} parameters, got {params.shape[-1]}")
        return [unitaries_from_params(p, d) for p, d in zip(self.split(params), self.dims)]

    def _unitaries(self, point) -> list[np.ndarray]:
        return point if isinstance(point, list) else self.local_unitaries(point)

    def full_unitaries(self, point) -> np.ndarray:
        us = self._unitaries(point)
        u = us[0]
        for nxt in us[1:]:
            u = _batched_kron(u, nxt)
        return u

    def probabilities(self, point) -> np.ndarray:
        """Joint outcome distribution <u_k|rho|u_k>, outcomes in lexicographic subsystem order."""
        u = self.full_unitaries(point)
        p = np.einsum("nik,nik->nk", u.conj(), self.matrix @ u).real
        return np.clip(p, 0.0, None)

    def basis_point(self, point, row: int = 0) -> LocalBasisPoint:
        us = self._unitaries(point if isinstance(point, list) else np.atleast_2d(point))
        return LocalBasisPoint(tuple(u[row] for u in us))

    # block evaluation -------------------------------------------------------

    def environment(self, point, x: int) -> np.ndarray:
        """Blocks E[n, m, a, b] = <a, m| W^dag rho W |b, m> with W the fixed unitaries.

        ``a, b`` index subsystem ``x``; ``m`` runs over the joint outcomes of the
        other subsystems in their original order.
        """
        us = self._unitaries(point)
        n = us[0].shape[0]
        eye = np.broadcast_to(np.eye(self.dims[x], dtype=complex), (n, self.dims[x], self.dims[x]))
        w = None
        for k, u in enumerate(us):
            f = eye if k == x else u
            w = f if w is None else _batched_kron(w, f)
        rot = np.conj(np.swapaxes(w, -1, -2)) @ self.matrix @ w
        k = len(self.dims)
        order = [x] + [y for y in range(k) if y != x]
        t = rot.reshape((n,) + self.dims + self.dims)
        t = np.transpose(t, [0] + [1 + y for y in order] + [1 + k + y for y in order])
        d = self.dims[x]
        rest = self.matrix.shape[0] // d
        t = t.reshape(n, d, rest, d, rest)
        return np.einsum("nambm->nmab", t)

    def block_probabilities(self, env: np.ndarray, x: int, trial: np.ndarray) -> np.ndarray:
        """Joint outcomes for trial unitaries of subsystem ``x``.

        ``trial`` has shape (variants, n, d, d). The result is indexed
        (variants, n, k_x, m), i.e. subsystem ``x`` first.
        """
        p = np.einsum("vnak,nmab,vnbk->vnkm", trial.conj(), env, trial, optimize=True).real
        return np.clip(p, 0.0, None)

    # objectives -------------------------------------------------------------

    def entropy(self, point) -> np.ndarray:
        return _shannon_rows(self.probabilities(point))

    def block_entropy(self, env: np.ndarray, x: int, trial: np.ndarray) -> np.ndarray:
        p = self.block_probabilities(env, x, trial)
        return _shannon_rows(p.reshape(p.shape[:2] + (-1,)))

    def _marginal_entropy_sum(self, t: np.ndarray, lead: int) -> np.ndarray:
        k = t.ndim - lead
        total = 0.0
        for y in range(k):
            axes = tuple(lead + z for z in range(k) if z != y)
            total = total + _shannon_rows(t.sum(axis=axes))
        return total

    def mutual_information(self, point) -> np.ndarray:
        p = self.probabilities(point)
        t = p.reshape((p.shape[0],) + self.dims)
        return self._marginal_entropy_sum(t, 1) - _shannon_rows(p)

    def block_mutual_information(self, env: np.ndarray, x: int, trial: np.ndarray) -> np.ndarray:
        p = self.block_probabilities(env, x, trial)
        rest = tuple(d for y, d in enumerate(self.dims) if y != x)
        t = p.reshape(p.shape[:2] + (self.dims[x],) + rest)
        return self._marginal_entropy_sum(t, 2) - _shannon_rows(p.reshape(p.shape[:2] + (-1,)))

    def dephasing_relative_entropy(self, point, svn_bits: float) -> np.ndarray:
        """S(rho || chi) for chi the dephased state, via an explicit logarithm of chi."""
        u = self.full_unitaries(point)
        p = np.einsum("nik,nik->nk", u.conj(), self.matrix @ u).real
        chi = (u * p[:, None, :]) @ np.conj(np.swapaxes(u, -1, -2))
        chi = 0.5 * (chi + np.conj(np.swapaxes(chi, -1, -2)))
        w, v = np.linalg.eigh(chi)
        small = w < 1e-14
        logw = np.log2(np.where(small, 1.0, w))
        log_chi = (v * logw[:, None, :]) @ np.conj(np.swapaxes(v, -1, -2))
        cross = np.einsum("ij,nji->n", self.matrix, log_chi).real
        out = -svn_bits - cross
        # weight of rho on the kernel of chi makes the divergence infinite
        if np.any(small):
            leak = np.einsum("nik,ij,njk->nk", v.conj(), self.matrix, v).real
            bad = np.any(small & (leak > 1e-10), axis=1)
            out = np.where(bad, np.inf, out)
        return out


def local_objective(rho: DensityMatrix, params: Sequence) -> float:
    """Shannon entropy of the joint outcomes in the product basis exp(iH_A) x ... x exp(iH_C).

    ``params`` is either one flat vector or a sequence of per-subsystem vectors.
    """
    land = Landscape(rho)
    flat = flatten_params(params, land.dims)
    return float(land.entropy(flat[None, :])[0])


def flatten_params(params, dims: Sequence[int]) -> np.ndarray:
    n_params = sum(d * d for d in dims)
    if isinstance(params, np.ndarray) and params.ndim == 1:
        flat = params.astype(float)
    else:
        parts = [np.asarray(p, dtype=float).reshape(-1) for p in params]
        if len(parts) != len(dims):
            raise ParameterError(f"expected parameters for {len(dims)} subsystems, got {len(parts)}")
        for p, d in zip(parts, dims):
            if p.size != d * d:
                raise ParameterError(f"subsystem of dimension {d} needs {d * d} parameters, got {p.size}")
        flat = np.concatenate(parts)
    if flat.size != n_params:
        raise ParameterError(f"expected {n_params} parameters, got {flat.size}")
    return flat


class AnchoredProblem:
    """Search problem over the landscape in coordinates anchored at the current unitaries.

    A restart starts from chart parameters drawn by the search; its anchor
    holds the local unitaries W_X (flattened and concatenated). Local
    coordinates are the off-diagonal (re, im) pairs of a generator G_X, and the
    point they describe is W_X exp(iG_X). Diagonal generators are left out
    because at the anchor they only rephase basis vectors, which no objective
    sees. Subclasses define ``score`` and optionally ``block_score``.
    """

    def __init__(self, land: Landscape):
        self.land = land
        self.n_start = land.n_params
        sizes = [d * (d - 1) for d in land.dims]
        edges = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
        self.n_params = int(edges[-1])
        self.blocks = [(int(edges[k]), int(edges[k + 1])) for k in range(len(land.dims))]

    def _local(self, coords: np.ndarray, d: int) -> np.ndarray:
        lead = coords.shape[:-1]
        return unitaries_from_params(np.concatenate([np.zeros(lead + (d,)), coords], axis=-1), d)

    def anchor(self, x0: np.ndarray) -> np.ndarray:
        us = self.land.local_unitaries(x0)
        return np.concatenate([u.reshape(u.shape[0], -1) for u in us], axis=1)

    def anchor_unitaries(self, a: np.ndarray) -> list[np.ndarray]:
        return [a[:, lo:hi].reshape(-1, d, d) for (lo, hi), d in zip(self.land.blocks, self.land.dims)]

    def unitaries(self, a: np.ndarray, x: np.ndarray) -> list[np.ndarray]:
        out = []
        for w, (lo, hi), d in zip(self.anchor_unitaries(a), self.blocks, self.land.dims):
            out.append(w @ self._local(x[:, lo:hi], d))
        return out

    def evaluate(self, a, x):
        return self.score(self.unitaries(a, x))

    def context(self, a, x, block):
        us = self.unitaries(a, x)
        return us, self.anchor_unitaries(a)[block], self.block_context(us, block)

    def evaluate_block(self, ctx, block, block_params):
        us, w, env = ctx
        trial = w[None] @ self._local(block_params, self.land.dims[block])
        return self.block_score(us, env, block, trial)

    def recenter(self, a, x):
        us = self.unitaries(a, x)
        return np.concatenate([u.reshape(u.shape[0], -1) for u in us], axis=1)

    def score(self, us: list[np.ndarray]) -> np.ndarray:
        raise NotImplementedError

    def block_context(self, us, block):
        return None

    def block_score(self, us, env, block, trial):
        # generic path: substitute the trial unitaries and score whole points
        v, n = trial.shape[:2]
        full = [np.broadcast_to(u, (v,) + u.shape).reshape(v * n, *u.shape[1:]) for u in us]
        full[block] = trial.reshape(v * n, *trial.shape[2:])
        return self.score(full).reshape(v, n)


class EntropyProblem(AnchoredProblem):
    """Joint outcome entropy, minimised by the search."""

    def score(self, us):
        return self.land.entropy(us)

    def block_context(self, us, block):
        return self.land.environment(us, block)

    def block_score(self, us, env, block, trial):
        return self.land.block_entropy(env, block, trial)


class NegativeMutualInformationProblem(EntropyProblem):
    """Negated measurement mutual information, so minimising it maximises the information."""

    def score(self, us):
        return -self.land.mutual_information(us)

    def block_score(self, us, env, block, trial):
        return -self.land.block_mutual_information(env, block, trial)


class DephasingProblem(AnchoredProblem):
    """Relative entropy from the state to its dephasing in the product basis."""

    def __init__(self, land: Landscape, svn_bits: float):
        super().__init__(land)
        self.svn_bits = svn_bits

    def score(self, us):
        return self.land.dephasing_relative_entropy(us, self.svn_bits)


class OffDiagonalProblem(AnchoredProblem):
    """Squared Frobenius norm of the off-diagonal part of U^dag rho U; zero exactly on diagonalising bases."""

    def score(self, us):
        u = self.land.full_unitaries(us)
        r = np.conj(np.swapaxes(u, -1, -2)) @ self.land.matrix @ u
        sq = np.abs(r) ** 2
        return sq.sum(axis=(-2, -1)) - np.einsum("nii->n", sq)
