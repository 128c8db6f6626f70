"""Quantum correlation entropy: observational entropy minimised over local coarse-grainings.

S^QC(rho) is the smallest coarse-grained entropy reachable with measurements
made subsystem by subsystem, minus the von Neumann entropy. It vanishes
exactly on classically correlated states and reduces to the entanglement
entropy on bipartite pure states.
"""

from .coarse import CoarseGraining, LocalBasisPoint, LocalCoarseGraining, dephase, product_cg
from .entropy import (
    measurement_mutual_information,
    observational_entropy,
    quantum_mutual_information,
    relative_entropy,
    shannon_entropy,
    von_neumann_entropy,
)
from .optimize import (
    OptimizerConfig,
    brute_force_qc,
    classical_mutual_information,
    is_classically_correlated,
    mutual_info_gap,
    qc_bipartite_pure,
    qc_entropy,
    qc_lower_bound,
    qc_maximally_correlated,
    qc_upper_bound,
    req_entropy,
)
from .states import (
    DensityMatrix,
    InvalidStateError,
    PartitionSpec,
    PureState,
    bell_state,
    classical_state,
    density_from_pure,
    example_b_state,
    ghz_state,
    maximally_correlated_state,
    named_state,
    random_density,
    regroup,
    two_bell_state,
)

__version__ = "0.1.0"

__all__ = [
    "CoarseGraining",
    "DensityMatrix",
    "InvalidStateError",
    "LocalBasisPoint",
    "LocalCoarseGraining",
    "OptimizerConfig",
    "PartitionSpec",
    "PureState",
    "bell_state",
    "brute_force_qc",
    "classical_mutual_information",
    "classical_state",
    "density_from_pure",
    "dephase",
    "example_b_state",
    "ghz_state",
    "is_classically_correlated",
    "maximally_correlated_state",
    "measurement_mutual_information",
    "mutual_info_gap",
    "named_state",
    "observational_entropy",
    "product_cg",
    "qc_bipartite_pure",
    "qc_entropy",
    "qc_lower_bound",
    "qc_maximally_correlated",
    "qc_upper_bound",
    "quantum_mutual_information",
    "random_density",
    "regroup",
    "relative_entropy",
    "req_entropy",
    "shannon_entropy",
    "two_bell_state",
    "von_neumann_entropy",
]
