"""Verification suites behind ``qcentropy verify``.

Each suite returns a list of :class:`Check` results, one per property, with
the worst case over its ensemble in the detail text. Ensembles are derived
from the seed alone, so a suite run is reproducible.

Suites:

* ``examples``: the two-Bell and GHZ table, the mixed separable
  example, its upper bound and the strict mutual-information gap.
* ``properties``: invariants of all modules on random 2- and 3-qubit states.
* ``oracle``: optimizer against brute force on 2-qubit states.
* ``fast-paths``: closed forms against the optimizer.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np

from . import linalg
from .coarse import (
    LocalBasisPoint,
    LocalCoarseGraining,
    dephase,
    from_basis_point,
    product_cg,
    random_coarse_graining,
    random_local_cg,
)
from .entropy import (
    observational_entropy,
    product_formula_residual,
    quantum_mutual_information,
    relative_entropy,
    von_neumann_entropy,
)
from .optimize import (
    OptimizerConfig,
    brute_force_qc,
    classical_mutual_information,
    local_objective,
    minimize_local_entropy,
    qc_bipartite_pure,
    qc_entropy,
    qc_lower_bounds,
    qc_maximally_correlated,
    qc_upper_bound,
    req_entropy,
    unitary_from_params,
)
from .optimize.landscape import params_from_unitary
from .states import (
    DensityMatrix,
    PartitionSpec,
    PureState,
    apply_local_unitaries,
    density_from_pure,
    example_b_state,
    ghz_state,
    haar_unitary,
    maximally_correlated_state,
    random_density,
    random_pure,
    regroup,
    tensor_states,
    two_bell_state,
)

# tolerances (bits)
EXAMPLE_A_TOL = 1e-3
EXAMPLE_B_VALUE = 0.50
EXAMPLE_B_TOL = 0.01
EXAMPLE_B_UPPER = 0.60088
EXAMPLE_B_UPPER_TOL = 1e-4
GAP_MARGIN = 0.01
SEARCH_TOL = 2e-3
ADDITIVITY_TOL = 3e-3
EXACT_TOL = 1e-9
LANDSCAPE_TOL = 1e-10
REQ_TOL = 1e-6
ORACLE_TOL = 0.01
RANGE_SLACK = 1e-6

# ensemble sizes
N_STATES = 52
N_RANDOM_CG = 100
N_LOCAL_CG = 20
N_TWIRLS = 10
N_PRODUCT = 20
N_SPECIAL = 5
N_ORACLE = 24
N_PURE = 20
N_SIGMA = 10


@dataclass(frozen=True)
class Check:
    id: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.id}: {self.detail} [{self.seconds:.1f}s]"


@dataclass
class _Worst:
    """Running worst case of a signed margin; negative margin means a violation."""

    tol: float
    margin: float = math.inf
    where: str = ""
    count: int = 0

    def add(self, margin: float, where: str) -> None:
        self.count += 1
        if margin < self.margin:
            self.margin, self.where = margin, where

    @property
    def passed(self) -> bool:
        return self.margin >= 0

    def detail(self, what: str) -> str:
        # excess = tol - margin: the deviation for two-sided checks, the overshoot for one-sided ones
        return f"{self.count} {what}, worst excess {self.tol - self.margin:.3g} at {self.where} (allowed {self.tol:g})"


def _timed(check_id: str, fn: Callable[[], tuple[bool, str]]) -> Check:
    start = time.perf_counter()
    ok, detail = fn()
    return Check(check_id, bool(ok), detail, time.perf_counter() - start)


def _state_seed(seed: int, tag: int, i: int) -> int:
    return int(np.random.SeedSequence([seed, tag, i]).generate_state(1)[0])


# ensembles ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Sample:
    name: str
    rho: DensityMatrix


def property_ensemble(seed: int, n: int = N_STATES) -> list[Sample]:
    """Alternating 2- and 3-qubit Ginibre states, cycling through ranks 1-4."""
    out = []
    for i in range(n):
        qubits = 2 + i % 2
        rank = 1 + (i // 2) % 4
        s = _state_seed(seed, 1, i)
        rho = random_density(2**qubits, rank, s, dims=(2,) * qubits)
        out.append(Sample(f"q{qubits}r{rank}#{i}", rho))
    return out


def two_qubit_ensemble(seed: int, n: int = N_ORACLE) -> list[Sample]:
    return [
        Sample(f"q2r{1 + i % 4}#{i}", random_density(4, 1 + i % 4, _state_seed(seed, 2, i), dims=(2, 2)))
        for i in range(n)
    ]


def _random_local_unitaries(dims, rng) -> list[np.ndarray]:
    return [haar_unitary(d, rng) for d in dims]


# suites ---------------------------------------------------------------------


def worked_examples(seed: int = 0, cfg: Optional[OptimizerConfig] = None) -> list[Check]:
    cfg = cfg or OptimizerConfig(seed=seed)
    two_bell = density_from_pure(two_bell_state())
    ghz = density_from_pure(ghz_state(4))
    # qubit order (A1, A2, B1, B2)
    partitions = {
        "A1|A2|B1|B2": None,
        "(A1B1)|(A2B2)": [[0, 2], [1, 3]],
        "(A1A2)|(B1B2)": [[0, 1], [2, 3]],
    }
    expected = {"two_bell": (2.0, 0.0, 2.0), "ghz4": (1.0, 1.0, 1.0)}
    checks = []
    for name, rho in (("two_bell", two_bell), ("ghz4", ghz)):
        for (label, groups), want in zip(partitions.items(), expected[name]):
            def run(rho=rho, groups=groups, want=want):
                state = rho if groups is None else regroup(rho, groups)
                value, _ = qc_entropy(state, cfg)
                return abs(value - want) <= EXAMPLE_A_TOL, f"S^QC = {value:.9f} bits, expected {want} +- {EXAMPLE_A_TOL:g}"

            checks.append(_timed(f"example-a/{name}/{label}", run))

    b = example_b_state()

    def value_b():
        value, _ = qc_entropy(b, cfg)
        return abs(value - EXAMPLE_B_VALUE) <= EXAMPLE_B_TOL, f"S^QC = {value:.9f} bits, expected 0.50 +- 0.01"

    def oracle_b():
        value, _ = qc_entropy(b, cfg)
        bf = brute_force_qc(b, seed=seed)
        ok = abs(value - bf) <= ORACLE_TOL and abs(bf - EXAMPLE_B_VALUE) <= EXAMPLE_B_TOL
        return ok, f"brute force {bf:.9f} bits, optimizer {value:.9f} bits"

    def upper_b():
        up = qc_upper_bound(b)
        return abs(up - EXAMPLE_B_UPPER) <= EXAMPLE_B_UPPER_TOL, f"upper bound {up:.9f} bits, expected 0.60088 +- 1e-4"

    def gap_b():
        value, _ = qc_entropy(b, cfg)
        iqm = quantum_mutual_information(b)
        icl = classical_mutual_information(b, cfg)
        slack = value - (iqm - icl)
        return slack > GAP_MARGIN, f"S^QC - (I_qm - I_cl) = {value:.6f} - ({iqm:.6f} - {icl:.6f}) = {slack:.6f} > 0.01"

    checks += [
        _timed("example-b/value", value_b),
        _timed("example-b/oracle", oracle_b),
        _timed("example-b/upper-bound", upper_b),
        _timed("example-b/strict-gap", gap_b),
    ]
    return checks


def properties(seed: int = 0, cfg: Optional[OptimizerConfig] = None, n_states: int = N_STATES) -> list[Check]:
    cfg = cfg or OptimizerConfig(seed=seed)
    ensemble = property_ensemble(seed, n_states)
    cache: dict[int, tuple[float, float]] = {}

    def qc(sample: Sample) -> float:
        key = id(sample)
        if key not in cache:
            res = minimize_local_entropy(sample.rho, cfg)
            cache[key] = (res.value, res.value - von_neumann_entropy(sample.rho))
        return cache[key][1]

    def min_value(sample: Sample) -> float:
        qc(sample)
        return cache[id(sample)][0]

    def rng_for(tag: int, i: int) -> np.random.Generator:
        return np.random.default_rng([seed, tag, i])

    def nonnegativity():
        w = _Worst(RANGE_SLACK)
        for s in ensemble:
            v = qc(s)
            top = math.log2(s.rho.dim) - von_neumann_entropy(s.rho)
            w.add(min(v + RANGE_SLACK, top + RANGE_SLACK - v), s.name)
        return w.passed, w.detail("states in [0, log2 dim - S^VN]")

    def minimality():
        w = _Worst(EXACT_TOL)
        for i, s in enumerate(ensemble):
            rng = rng_for(10, i)
            svn = von_neumann_entropy(s.rho)
            for _ in range(N_RANDOM_CG):
                cg = random_coarse_graining(s.rho.dim, rng)
                w.add(observational_entropy(s.rho, cg) - svn + EXACT_TOL, s.name)
        return w.passed, w.detail("random coarse-grainings, S_C >= S^VN")

    def optimizer_sanity():
        w = _Worst(RANGE_SLACK)
        for i, s in enumerate(ensemble):
            rng = rng_for(11, i)
            best = min_value(s)
            for _ in range(N_RANDOM_CG):
                params = [rng.uniform(-np.pi, np.pi, d * d) for d in s.rho.dims]
                w.add(local_objective(s.rho, params) - best + RANGE_SLACK, s.name)
        return w.passed, w.detail("random basis points, objective >= search minimum")

    def sandwich():
        w = _Worst(SEARCH_TOL)
        for s in ensemble:
            v = qc(s)
            lower = max(qc_lower_bounds(s.rho).values())
            w.add(min(v - lower, qc_upper_bound(s.rho) - v) + SEARCH_TOL, s.name)
        return w.passed, w.detail("states between lower and upper bounds")

    def monotonicity():
        w = _Worst(SEARCH_TOL)
        for s in ensemble:
            if len(s.rho.dims) != 3:
                continue
            coarse, _ = qc_entropy(regroup(s.rho, [[0], [1, 2]]), cfg)
            w.add(qc(s) - coarse + SEARCH_TOL, s.name)
        return w.passed, w.detail("3-qubit states, A|B1|B2 >= A|B")

    def twirl_invariance():
        w = _Worst(SEARCH_TOL)
        for i, s in enumerate(ensemble):
            rng = rng_for(12, i)
            v = qc(s)
            for k in range(N_TWIRLS):
                twisted = apply_local_unitaries(s.rho, _random_local_unitaries(s.rho.dims, rng))
                tv, _ = qc_entropy(twisted, cfg)
                w.add(SEARCH_TOL - abs(tv - v), f"{s.name}/twirl{k}")
        return w.passed, w.detail("local-unitary twirls")

    def landscape_identity():
        w = _Worst(LANDSCAPE_TOL)
        for i, s in enumerate(ensemble):
            rng = rng_for(13, i)
            us = _random_local_unitaries(s.rho.dims, rng)
            twisted = apply_local_unitaries(s.rho, us)
            for _ in range(5):
                params = [rng.uniform(-np.pi, np.pi, d * d) for d in s.rho.dims]
                absorbed = [
                    params_from_unitary(u.conj().T @ unitary_from_params(p, d))
                    for u, p, d in zip(us, params, s.rho.dims)
                ]
                diff = abs(local_objective(twisted, params) - local_objective(s.rho, absorbed))
                w.add(LANDSCAPE_TOL - diff, s.name)
        return w.passed, w.detail("objective evaluations with absorbed unitaries")

    def _local_cgs(i: int, s: Sample) -> Iterable[LocalCoarseGraining]:
        rng = rng_for(14, i)
        for _ in range(N_LOCAL_CG):
            yield random_local_cg(s.rho.dims, rng)

    def product_formula():
        w = _Worst(EXACT_TOL)
        for i, s in enumerate(ensemble):
            for local in _local_cgs(i, s):
                w.add(EXACT_TOL - product_formula_residual(s.rho, local), s.name)
        return w.passed, w.detail("local coarse-grainings, joint = marginal sum - mutual information")

    def partial_trace_lemma():
        w = _Worst(EXACT_TOL)
        for i, s in enumerate(ensemble):
            n = len(s.rho.dims)
            for local in _local_cgs(i, s):
                full = observational_entropy(s.rho, product_cg(local))
                for drop in range(n):
                    keep = [x for x in range(n) if x != drop]
                    reduced = DensityMatrix(
                        linalg.partial_trace(s.rho.matrix, s.rho.dims, keep),
                        PartitionSpec(tuple(s.rho.dims[x] for x in keep)),
                    )
                    sub = LocalCoarseGraining(tuple(local.factors[x] for x in keep), reduced.partition)
                    w.add(full - observational_entropy(reduced, product_cg(sub)) + EXACT_TOL, s.name)
        return w.passed, w.detail("(coarse-graining, traced subsystem) pairs, entropy never increases")

    def basis_covariance():
        w = _Worst(LANDSCAPE_TOL)
        for i, s in enumerate(ensemble):
            rng = rng_for(15, i)
            u = haar_unitary(s.rho.dim, rng)
            rotated = DensityMatrix(u @ s.rho.matrix @ u.conj().T, s.rho.partition)
            for _ in range(5):
                cg = random_coarse_graining(s.rho.dim, rng)
                diff = abs(observational_entropy(s.rho, cg) - observational_entropy(rotated, cg.conjugated(u)))
                w.add(LANDSCAPE_TOL - diff, s.name)
        return w.passed, w.detail("global rotations of state and coarse-graining")

    def dephasing_identity():
        w = _Worst(EXACT_TOL)
        for i, s in enumerate(ensemble):
            rng = rng_for(16, i)
            svn = von_neumann_entropy(s.rho)
            for _ in range(5):
                p = LocalBasisPoint(tuple(_random_local_unitaries(s.rho.dims, rng)))
                rel = relative_entropy(s.rho, dephase(s.rho, p))
                obs = observational_entropy(s.rho, product_cg(from_basis_point(p))) - svn
                w.add(EXACT_TOL - abs(rel - obs), s.name)
        return w.passed, w.detail("basis points, relative entropy to dephasing = entropy excess")

    def req_equivalence():
        w = _Worst(REQ_TOL)
        for s in ensemble:
            r, _ = req_entropy(s.rho, cfg)
            w.add(REQ_TOL - abs(r - qc(s)), s.name)
        return w.passed, w.detail("states, minimised relative entropy = S^QC")

    def oracle_agreement():
        w = _Worst(ORACLE_TOL)
        for s in ensemble:
            if len(s.rho.dims) != 2:
                continue
            w.add(ORACLE_TOL - abs(qc(s) - brute_force_qc(s.rho, seed=seed)), s.name)
        return w.passed, w.detail("2-qubit states against brute force")

    def additivity():
        w = _Worst(ADDITIVITY_TOL)
        w15 = _Worst(SEARCH_TOL)
        for i in range(N_PRODUCT):
            ra = random_density(4, 1 + i % 4, _state_seed(seed, 3, i), dims=(2, 2))
            rb = random_density(4, 1 + (i // 4) % 4, _state_seed(seed, 4, i), dims=(2, 2))
            joint = tensor_states(ra, rb)
            qa, _ = qc_entropy(ra, cfg)
            qb, _ = qc_entropy(rb, cfg)
            qj, _ = qc_entropy(joint, cfg)
            w.add(ADDITIVITY_TOL - abs(qj - qa - qb), f"product#{i}")
            qab, _ = qc_entropy(regroup(joint, [[0, 1], [2], [3]]), cfg)
            w15.add(SEARCH_TOL - abs(qab - qb), f"product#{i}")
        ok = w.passed and w15.passed
        return ok, w.detail("4-qubit products, additive") + "; " + w15.detail("A|B1|B2 = B1|B2")

    def special_case():
        w = _Worst(SEARCH_TOL)
        for i in range(N_SPECIAL):
            rng = rng_for(17, i)
            alpha = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            alpha /= np.linalg.norm(alpha)
            bases = _random_local_unitaries((2, 2, 2), rng)
            amps = sum(alpha[k] * linalg.tensor_all(b[:, k] for b in bases) for k in range(2))
            rho = density_from_pure(PureState(amps, PartitionSpec.qubits(3)))
            s0 = von_neumann_entropy(rho.reduced([0]))
            v, _ = qc_entropy(rho, cfg)
            w.add(SEARCH_TOL - abs(v - s0), f"ghz-like#{i}")
        return w.passed, w.detail("3-qubit states sum_k a_k|a_k b_k c_k>, S^QC = S^VN(rho_A)")

    return [
        _timed("nonnegativity", nonnegativity),
        _timed("minimality", minimality),
        _timed("optimizer-sanity", optimizer_sanity),
        _timed("sandwich", sandwich),
        _timed("partition-monotonicity", monotonicity),
        _timed("additivity", additivity),
        _timed("local-unitary-invariance", twirl_invariance),
        _timed("landscape-identity", landscape_identity),
        _timed("product-formula", product_formula),
        _timed("partial-trace-lemma", partial_trace_lemma),
        _timed("basis-covariance", basis_covariance),
        _timed("dephasing-identity", dephasing_identity),
        _timed("req-equivalence", req_equivalence),
        _timed("oracle-agreement", oracle_agreement),
        _timed("special-case", special_case),
    ]


def oracle_suite(seed: int = 0, cfg: Optional[OptimizerConfig] = None, n: int = N_ORACLE) -> list[Check]:
    cfg = cfg or OptimizerConfig(seed=seed)
    samples = [Sample("bell", density_from_pure(ghz_state(2))), Sample("example_b", example_b_state())]
    samples += two_qubit_ensemble(seed, n)

    def run():
        w = _Worst(ORACLE_TOL)
        for s in samples:
            v, _ = qc_entropy(s.rho, cfg)
            w.add(ORACLE_TOL - abs(v - brute_force_qc(s.rho, seed=seed)), s.name)
        return w.passed, w.detail("2-qubit states, optimizer vs brute force")

    return [_timed("oracle-agreement", run)]


def fast_paths(seed: int = 0, cfg: Optional[OptimizerConfig] = None) -> list[Check]:
    cfg = cfg or OptimizerConfig(seed=seed)

    def pure():
        w = _Worst(SEARCH_TOL)
        for i in range(N_PURE):
            dims = ((2, 2), (2, 3), (3, 3), (2, 4))[i % 4]
            psi = random_pure(dims, _state_seed(seed, 5, i))
            v, _ = qc_entropy(density_from_pure(psi), cfg)
            w.add(SEARCH_TOL - abs(v - qc_bipartite_pure(psi)), f"pure{dims}#{i}")
        return w.passed, w.detail("bipartite pure states, Schmidt entropy vs optimizer")

    def sigma():
        w = _Worst(SEARCH_TOL)
        for i in range(N_SIGMA):
            rng = np.random.default_rng([seed, 6, i])
            n = 2 + i % 2
            g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            sig = g @ g.conj().T
            sig /= np.trace(sig).real
            dims = (n, n) if i % 4 < 2 else (n, n, n)
            bases = _random_local_unitaries(dims, rng)
            rho = maximally_correlated_state(sig, bases=bases)
            v, _ = qc_entropy(rho, cfg)
            w.add(SEARCH_TOL - abs(v - qc_maximally_correlated(sig)), f"sigma{n}x{len(dims)}#{i}")
        return w.passed, w.detail("maximally correlated states, closed form vs optimizer")

    return [_timed("fast-path/bipartite-pure", pure), _timed("fast-path/maximally-correlated", sigma)]


SUITES: dict[str, Callable[..., list[Check]]] = {
    "examples": worked_examples,
    "properties": properties,
    "oracle": oracle_suite,
    "fast-paths": fast_paths,
}


def run_suites(names: Iterable[str], seed: int = 0, restarts: int = 32, emit: Callable[[str], None] = print) -> list[Check]:
    cfg = OptimizerConfig(restarts=restarts, seed=seed)
    results = []
    for name in names:
        if name not in SUITES:
            raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
        for check in SUITES[name](seed, cfg):
            emit(check.line())
            results.append(check)
    return results
