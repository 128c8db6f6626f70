"""Entropy functionals: Shannon, von Neumann, observational (coarse-grained),
measurement mutual information, relative entropy and quantum mutual information.

All values are in bits unless ``base`` is given; ``base=math.e`` gives nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .coarse import CoarseGraining, LocalCoarseGraining, product_cg
from .states import DensityMatrix

PROB_TOL = 1e-9
NEGATIVE_PROB_TOL = 1e-12
# eigenvalues below this count as exact zeros (0 log 0 = 0)
EIG_ZERO = 1e-14
VOLUME_TOL = 1e-8


class EntropyError(ValueError):
    pass


def _matrix(rho) -> np.ndarray:
    return rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


def _xlogx(p: np.ndarray) -> np.ndarray:
    out = np.zeros_like(p, dtype=float)
    mask = p > 0
    out[mask] = p[mask] * np.log2(p[mask])
    return out


def _to_base(bits: float, base: float) -> float:
    return bits if base == 2 else bits * math.log(2) / math.log(base)


def check_distribution(p) -> np.ndarray:
    p = np.asarray(p, dtype=float).reshape(-1)
    if p.size == 0:
        raise EntropyError("empty distribution")
    if np.any(p < -NEGATIVE_PROB_TOL):
        raise EntropyError(f"negative probability {p.min():.3e}")
    total = p.sum()
    if abs(total - 1) > PROB_TOL:
        raise EntropyError(f"probabilities sum to {total:.12g}, expected 1")
    return np.clip(p, 0.0, None)


def shannon_entropy(p, base: float = 2) -> float:
    """-sum p log p with 0 log 0 = 0.

    >>> shannon_entropy([0.25] * 4)
    2.0
    """
    p = check_distribution(p)
    return _to_base(float(-_xlogx(p).sum()) + 0.0, base)


def spectrum(rho) -> np.ndarray:
    w = np.linalg.eigvalsh(0.5 * (_matrix(rho) + _matrix(rho).conj().T))
    w = np.where(np.abs(w) < EIG_ZERO, 0.0, w)
    return w[::-1]


def von_neumann_entropy(rho, base: float = 2) -> float:
    w = np.clip(spectrum(rho), 0.0, None)
    return _to_base(float(-_xlogx(w).sum()) + 0.0, base)


def binary_entropy(x: float) -> float:
    return shannon_entropy([x, 1 - x])


@dataclass(frozen=True, eq=False)
class MeasurementDistribution:
    probabilities: np.ndarray
    volumes: np.ndarray
    labels: tuple[tuple[int, ...], ...]


def measurement_distribution(rho, cg: CoarseGraining) -> MeasurementDistribution:
    """Macrostate probabilities tr(P rho) and volumes tr(P)."""
    m = _matrix(rho)
    if m.shape[0] != cg.dim:
        raise EntropyError(f"state dimension {m.shape[0]} does not match coarse-graining dimension {cg.dim}")
    projs = np.stack(cg.projectors)
    p = np.einsum("kij,ji->k", projs, m).real
    vol_raw = np.einsum("kii->k", projs).real
    volumes = np.rint(vol_raw)
    bad = np.abs(vol_raw - volumes) > VOLUME_TOL
    if np.any(bad) or np.any(volumes < 1):
        raise EntropyError(f"projector traces {vol_raw[bad | (volumes < 1)]} are not positive integers")
    if np.any(p < -NEGATIVE_PROB_TOL):
        raise EntropyError(f"negative macrostate probability {p.min():.3e}")
    p = np.clip(p, 0.0, None)
    if abs(p.sum() - 1) > PROB_TOL:
        raise EntropyError(f"macrostate probabilities sum to {p.sum():.12g}; coarse-graining is incomplete")
    labels = tuple((k,) for k in range(len(p)))
    return MeasurementDistribution(p, volumes.astype(int), labels)


def observational_entropy(rho, cg: CoarseGraining, base: float = 2) -> float:
    """-sum_i p_i log(p_i / V_i); empty macrostates contribute nothing."""
    dist = measurement_distribution(rho, cg)
    p, v = dist.probabilities, dist.volumes
    mask = p > 0
    bits = -float(np.sum(p[mask] * np.log2(p[mask] / v[mask]))) + 0.0
    return _to_base(bits, base)


def _joint_and_marginals(rho: DensityMatrix, local: LocalCoarseGraining):
    if local.partition.dims != rho.dims:
        raise EntropyError(f"local coarse-graining dims {local.partition.dims} do not match state dims {rho.dims}")
    joint = measurement_distribution(rho, product_cg(local)).probabilities.reshape(local.shape)
    marginals = []
    for x, factor in enumerate(local.factors):
        reduced = linalg.partial_trace(rho.matrix, rho.dims, [x])
        marginals.append(measurement_distribution(reduced, factor).probabilities)
    return joint, marginals


def measurement_mutual_information(rho: DensityMatrix, local: LocalCoarseGraining, base: float = 2) -> float:
    """sum p log(p / (p^A p^B ... p^C)) for the joint local measurement.

    Marginals are taken from the reduced states, tr(P^X rho_X).
    """
    joint, marginals = _joint_and_marginals(rho, local)
    outer = marginals[0]
    for m in marginals[1:]:
        outer = np.multiply.outer(outer, m)
    mask = joint > 0
    bits = float(np.sum(joint[mask] * np.log2(joint[mask] / outer[mask])))
    if bits < -1e-9:
        raise EntropyError(f"measurement mutual information is negative ({bits:.3e})")
    return _to_base(max(bits, 0.0), base)


def product_formula_residual(rho: DensityMatrix, local: LocalCoarseGraining) -> float:
    """|S_{C_A x..x C_C}(rho) - (sum_X S_{C_X}(rho_X) - I)|, each side evaluated separately."""
    lhs = observational_entropy(rho, product_cg(local))
    marginal_sum = sum(
        observational_entropy(linalg.partial_trace(rho.matrix, rho.dims, [x]), factor)
        for x, factor in enumerate(local.factors)
    )
    rhs = marginal_sum - measurement_mutual_information(rho, local)
    return abs(lhs - rhs)


product_formula_check = product_formula_residual


def relative_entropy(rho, chi, base: float = 2, support_tol: float = 1e-10) -> float:
    """tr(rho log rho - rho log chi); ``math.inf`` when supp(rho) is not inside supp(chi)."""
    r = _matrix(rho)
    c = _matrix(chi)
    if r.shape != c.shape:
        raise EntropyError("relative entropy needs matrices of equal shape")
    wc, vc = np.linalg.eigh(0.5 * (c + c.conj().T))
    null = wc < EIG_ZERO
    if np.any(null):
        # weight of rho on the kernel of chi
        leak = np.einsum("ik,ij,jk->k", vc[:, null].conj(), r, vc[:, null]).real
        if np.any(leak > support_tol):
            return math.inf
    log_wc = np.zeros_like(wc)
    log_wc[~null] = np.log2(wc[~null])
    log_chi = (vc * log_wc) @ vc.conj().T
    cross = float(np.trace(r @ log_chi).real)
    bits = -von_neumann_entropy(r) - cross
    return _to_base(max(bits, 0.0) if bits > -1e-9 else bits, base)


def quantum_mutual_information(rho: DensityMatrix, base: float = 2) -> float:
    if len(rho.dims) != 2:
        raise EntropyError(f"quantum mutual information needs a bipartition, got {len(rho.dims)} parties")
    sa = von_neumann_entropy(linalg.partial_trace(rho.matrix, rho.dims, [0]))
    sb = von_neumann_entropy(linalg.partial_trace(rho.matrix, rho.dims, [1]))
    bits = sa + sb - von_neumann_entropy(rho)
    return _to_base(max(bits, 0.0) if bits > -1e-9 else bits, base)


def subsystem_entropies(rho: DensityMatrix, subsets: Sequence[Sequence[int]]) -> list[float]:
    return [von_neumann_entropy(linalg.partial_trace(rho.matrix, rho.dims, s)) for s in subsets]
