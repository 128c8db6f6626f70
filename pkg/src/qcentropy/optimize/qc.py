"""Quantum correlation entropy: the local-measurement entropy gap above S^VN.

The search runs over rank-1 local coarse-grainings only; refining a
coarse-graining to rank-1 never raises its entropy, so nothing is lost.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .. import linalg
from ..coarse import LocalBasisPoint, LocalCoarseGraining, basis_cg, dephase, product_cg
from ..entropy import (
    observational_entropy,
    quantum_mutual_information,
    shannon_entropy,
    von_neumann_entropy,
)
from ..states import DensityMatrix, PureState, _check_sigma, schmidt_decompose
from .landscape import (
    AnchoredProblem,
    DephasingProblem,
    EntropyProblem,
    Landscape,
    NegativeMutualInformationProblem,
    OffDiagonalProblem,
)
from .search import OptimizerConfig, SearchOutcome, compass_search

CLIP_TOL = 1e-9
CLASSICAL_THRESHOLD = 1e-6
# witness polish: start small around the argmin and run far below the entropy tolerance
POLISH = OptimizerConfig(restarts=1, max_iterations=500, objective_tol=1e-30, initial_step=1e-3, final_step=1e-13)


class InternalConsistencyError(RuntimeError):
    """A computed quantity contradicts a proved inequality (e.g. S^QC < 0)."""


@dataclass(frozen=True, eq=False)
class OptimizationResult:
    value: float
    argmin: LocalBasisPoint
    best_per_restart: tuple[float, ...]
    iterations: tuple[int, ...]
    converged: bool

    @property
    def restarts(self) -> int:
        return len(self.best_per_restart)


def _result(problem: AnchoredProblem, out: SearchOutcome, values: np.ndarray) -> OptimizationResult:
    best = int(np.argmin(values))
    return OptimizationResult(
        value=float(values[best]),
        argmin=problem.land.basis_point(problem.anchor_unitaries(out.anchors), best),
        best_per_restart=tuple(float(v) for v in values),
        iterations=tuple(int(i) for i in out.iterations),
        converged=bool(np.all(out.converged)),
    )


def _clip(value: float, what: str) -> float:
    if value < -CLIP_TOL:
        raise InternalConsistencyError(f"{what} came out negative ({value:.3e} bits)")
    return max(value, 0.0)


def minimize_local_entropy(rho: DensityMatrix, cfg: OptimizerConfig = OptimizerConfig()) -> OptimizationResult:
    """Smallest joint-outcome entropy found over rank-1 local bases."""
    problem = EntropyProblem(Landscape(rho))
    out = compass_search(problem, cfg)
    return _result(problem, out, out.f)


def qc_entropy(rho: DensityMatrix, cfg: OptimizerConfig = OptimizerConfig()) -> tuple[float, OptimizationResult]:
    """Best local coarse-grained entropy minus the von Neumann entropy.

    The value is an upper estimate of the infimum: the search can only miss
    the optimum from above.
    """
    res = minimize_local_entropy(rho, cfg)
    return _clip(res.value - von_neumann_entropy(rho), "S^QC"), res


def req_entropy(rho: DensityMatrix, cfg: OptimizerConfig = OptimizerConfig()) -> tuple[float, OptimizationResult]:
    """Smallest relative entropy from ``rho`` to its local dephasings.

    Scores each basis point by S(rho || dephased rho) computed through a matrix
    logarithm, independently of the outcome-entropy path in :func:`qc_entropy`.
    """
    problem = DephasingProblem(Landscape(rho), von_neumann_entropy(rho))
    out = compass_search(problem, cfg)
    res = _result(problem, out, out.f)
    return _clip(res.value, "relative entropy of quantumness"), res


def qc_bipartite_pure(psi: PureState, cut: int = 1) -> float:
    """Entanglement entropy across ``cut``: Shannon entropy of the squared Schmidt coefficients."""
    s = schmidt_decompose(psi, cut).coefficients
    p = s**2
    return shannon_entropy(p / p.sum())


def qc_maximally_correlated(sigma) -> float:
    """Closed form for sum_ij sigma_ij |a_i..c_i><a_j..c_j|: H(diag sigma) - S^VN(sigma)."""
    sigma = np.asarray(sigma, dtype=complex)
    _check_sigma(sigma)
    diag = np.clip(np.diagonal(sigma).real, 0.0, None)
    value = shannon_entropy(diag / diag.sum()) - von_neumann_entropy(sigma)
    return _clip(value, "S^QC")


def _subsets(n: int) -> Iterable[tuple[int, ...]]:
    for r in range(1, n):
        yield from itertools.combinations(range(n), r)


def qc_lower_bound(rho: DensityMatrix, keep: Iterable[int]) -> float:
    """max(0, S^VN(rho_keep) - S^VN(rho)) for a nonempty proper subset of subsystems."""
    keep = tuple(sorted(set(int(k) for k in keep)))
    n = len(rho.dims)
    if not keep or len(keep) >= n or keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"kept subsystems {keep} must be a nonempty proper subset of range({n})")
    local = von_neumann_entropy(linalg.partial_trace(rho.matrix, rho.dims, keep))
    return max(0.0, local - von_neumann_entropy(rho))


def qc_lower_bounds(rho: DensityMatrix) -> dict[tuple[int, ...], float]:
    """Lower bound for every nonempty proper subset of subsystems."""
    return {s: qc_lower_bound(rho, s) for s in _subsets(len(rho.dims))}


def qc_upper_bound(rho: DensityMatrix) -> float:
    """sum_X S^VN(rho_X) - S^VN(rho)."""
    total = sum(
        von_neumann_entropy(linalg.partial_trace(rho.matrix, rho.dims, [x])) for x in range(len(rho.dims))
    )
    return total - von_neumann_entropy(rho)


def maximize_mutual_information(rho: DensityMatrix, cfg: OptimizerConfig = OptimizerConfig()) -> OptimizationResult:
    problem = NegativeMutualInformationProblem(Landscape(rho))
    out = compass_search(problem, cfg)
    res = _result(problem, out, out.f)
    # report information, not its negation
    return OptimizationResult(
        value=-res.value,
        argmin=res.argmin,
        best_per_restart=tuple(-v for v in res.best_per_restart),
        iterations=res.iterations,
        converged=res.converged,
    )


def classical_mutual_information(rho: DensityMatrix, cfg: OptimizerConfig = OptimizerConfig()) -> float:
    """Largest measurement mutual information over rank-1 local bases."""
    if len(rho.dims) != 2:
        raise ValueError(f"classical mutual information needs a bipartite state, got {len(rho.dims)} parties")
    return max(maximize_mutual_information(rho, cfg).value, 0.0)


def mutual_info_gap(rho: DensityMatrix, cfg: OptimizerConfig = OptimizerConfig()) -> float:
    """I_qm - I_cl, a lower bound on S^QC for bipartite states."""
    return quantum_mutual_information(rho) - classical_mutual_information(rho, cfg)


def marginal_eigenbases(rho: DensityMatrix) -> LocalBasisPoint:
    """Eigenvector basis of every single-subsystem marginal (deterministic within degenerate blocks)."""
    return LocalBasisPoint(
        tuple(
            np.asarray(
                linalg.hermitian_eigendecomposition(linalg.partial_trace(rho.matrix, rho.dims, [x])).eigenvectors
            )
            for x in range(len(rho.dims))
        )
    )


def eigenbasis_product_value(rho: DensityMatrix) -> float:
    """Observational entropy in the product of marginal eigenbases, minus S^VN.

    Degenerate marginal eigenspaces are split into the deterministic rank-1
    eigenvectors; the split never raises the entropy.
    """
    basis = marginal_eigenbases(rho)
    local = LocalCoarseGraining(tuple(basis_cg(u) for u in basis.unitaries), rho.partition)
    return _clip(observational_entropy(rho, product_cg(local)) - von_neumann_entropy(rho), "eigenbasis value")


@dataclass(frozen=True, eq=False)
class ClassicalityVerdict:
    classical: bool
    qc_value: float
    offdiagonal_norm: float
    threshold: float
    basis: LocalBasisPoint

    @property
    def witness(self) -> Optional[LocalBasisPoint]:
        """A product basis diagonalising the state, when one was found."""
        return self.basis if self.classical else None

    def __bool__(self) -> bool:
        return self.classical


def _polish_witness(rho: DensityMatrix, basis: LocalBasisPoint) -> LocalBasisPoint:
    problem = OffDiagonalProblem(Landscape(rho))
    start = np.concatenate([np.asarray(u).reshape(1, -1) for u in basis.unitaries], axis=1)
    out = compass_search(problem, POLISH, anchors=start)
    if out.f[0] >= problem.evaluate(start, np.zeros((1, problem.n_params)))[0]:
        return basis
    return problem.land.basis_point(problem.anchor_unitaries(out.anchors))


def is_classically_correlated(
    rho: DensityMatrix,
    cfg: OptimizerConfig = OptimizerConfig(),
    threshold: float = CLASSICAL_THRESHOLD,
    computed: Optional[tuple[float, OptimizationResult]] = None,
) -> ClassicalityVerdict:
    """Classical iff S^QC < threshold and the optimal basis diagonalises ``rho``.

    The entropy is flat to second order at a diagonalising basis, so the
    argmin only pins the basis to about the square root of the objective
    tolerance. When S^QC is below threshold the argmin is first polished by
    minimising the off-diagonal weight directly. ``computed`` reuses an
    earlier :func:`qc_entropy` result for the same state.
    """
    value, res = computed if computed is not None else qc_entropy(rho, cfg)
    basis = _polish_witness(rho, res.argmin) if value < threshold else res.argmin
    off = float(np.linalg.norm(dephase(rho, basis).matrix - rho.matrix))
    return ClassicalityVerdict(value < threshold and off < 10 * threshold, value, off, threshold, basis)
