"""Searches over local bases: S^QC, its bounds and fast paths, and the brute-force oracle."""

from .landscape import Landscape, local_objective, unitary_from_params, unitaries_from_params
from .oracle import brute_force_qc
from .qc import (
    ClassicalityVerdict,
    InternalConsistencyError,
    OptimizationResult,
    classical_mutual_information,
    eigenbasis_product_value,
    is_classically_correlated,
    maximize_mutual_information,
    minimize_local_entropy,
    mutual_info_gap,
    qc_bipartite_pure,
    qc_entropy,
    qc_lower_bound,
    qc_lower_bounds,
    qc_maximally_correlated,
    qc_upper_bound,
    req_entropy,
)
from .search import OptimizerConfig

__all__ = [
    "ClassicalityVerdict",
    "InternalConsistencyError",
    "Landscape",
    "OptimizationResult",
    "OptimizerConfig",
    "brute_force_qc",
    "classical_mutual_information",
    "eigenbasis_product_value",
    "is_classically_correlated",
    "local_objective",
    "maximize_mutual_information",
    "minimize_local_entropy",
    "mutual_info_gap",
    "qc_bipartite_pure",
    "qc_entropy",
    "qc_lower_bound",
    "qc_lower_bounds",
    "qc_maximally_correlated",
    "qc_upper_bound",
    "req_entropy",
    "unitaries_from_params",
    "unitary_from_params",
]
