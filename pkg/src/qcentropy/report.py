"""Entropy reports: computation pipeline and JSON/CSV serialisation.

Every real number is rounded to 9 significant digits when a report is built,
so serialising and parsing a report gives back an equal report, and two runs
with the same seed print identical numbers. Entropies are in the unit named by
``units`` (bits by default, nats with ``--log-base e``); the ``*_bits`` key
names are kept either way so the schema does not depend on the unit.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Any, Optional

from .entropy import quantum_mutual_information, von_neumann_entropy
from .optimize import (
    InternalConsistencyError,
    OptimizerConfig,
    brute_force_qc,
    classical_mutual_information,
    is_classically_correlated,
    qc_entropy,
    qc_lower_bounds,
    qc_upper_bound,
)
from .optimize.oracle import MAX_DIM
from .optimize.qc import CLASSICAL_THRESHOLD
from .specs import StateSpec

SIG_DIGITS = 9
# magnitudes below this are eigensolver noise on exact zeros
ZERO_SNAP = 1e-12
UNITS = {"2": "bits", "e": "nats"}
# a value this far below a proved lower bound means the evaluation itself is wrong
BOUND_SLACK = 1e-6

CSV_FIELDS = (
    "state",
    "partition",
    "units",
    "svn_bits",
    "sqc_bits",
    "lower_max",
    "upper",
    "iqm",
    "icl",
    "gap",
    "classical_verdict",
    "classical_threshold",
    "seed",
    "restarts",
    "converged",
    "runtime_seconds",
)


class ReportError(ValueError):
    pass


def sig(x: float) -> float:
    """Round to 9 significant digits (shortest repr then has at most 9); snap |x| < 1e-12 to 0."""
    x = float(x)
    if not math.isfinite(x):
        raise ReportError(f"non-finite value {x!r} in report")
    if abs(x) < ZERO_SNAP:
        return 0.0
    return float(f"{x:.{SIG_DIGITS}g}") + 0.0


def subset_key(subset) -> str:
    return ",".join(str(i) for i in subset)


@dataclass(frozen=True)
class EntropyReport:
    state: str
    partition: tuple[int, ...]
    units: str
    svn_bits: float
    sqc_bits: float
    lower: dict[str, float]
    upper: float
    classical_verdict: bool
    classical_threshold: float
    seed: int
    restarts: int
    best_per_restart: tuple[float, ...]
    converged: bool
    runtime_seconds: float
    mutual: Optional[dict[str, float]] = None
    oracle: Optional[dict[str, Any]] = field(default=None)

    def __post_init__(self):
        set_ = lambda k, v: object.__setattr__(self, k, v)  # noqa: E731
        set_("partition", tuple(int(d) for d in self.partition))
        for k in ("svn_bits", "sqc_bits", "upper", "classical_threshold", "runtime_seconds"):
            set_(k, sig(getattr(self, k)))
        set_("lower", {str(k): sig(v) for k, v in self.lower.items()})
        set_("best_per_restart", tuple(sig(v) for v in self.best_per_restart))
        if self.mutual is not None:
            set_("mutual", {k: sig(self.mutual[k]) for k in ("iqm", "icl", "gap")})
        if self.oracle is not None:
            set_("oracle", {k: sig(v) if isinstance(v, float) else v for k, v in self.oracle.items()})
        entropies = [self.svn_bits, self.sqc_bits, self.upper, *self.lower.values()]
        if self.mutual is not None:
            entropies += [self.mutual["iqm"], self.mutual["icl"]]
        if min(entropies) < -1e-9:
            raise ReportError(f"negative entropy {min(entropies)} in report")

    @property
    def lower_max(self) -> float:
        return max(self.lower.values(), default=0.0)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "state": self.state,
            "partition": list(self.partition),
            "units": self.units,
            "svn_bits": self.svn_bits,
            "sqc_bits": self.sqc_bits,
            "bounds": {"lower": dict(self.lower), "lower_max": self.lower_max, "upper": self.upper},
        }
        if self.mutual is not None:
            out["mutual"] = dict(self.mutual)
        out["classical"] = {"verdict": self.classical_verdict, "threshold": self.classical_threshold}
        out["optimizer"] = {
            "seed": self.seed,
            "restarts": self.restarts,
            "best_per_restart": list(self.best_per_restart),
            "converged": self.converged,
        }
        if self.oracle is not None:
            out["oracle"] = dict(self.oracle)
        out["runtime_seconds"] = self.runtime_seconds
        return out

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "EntropyReport":
        try:
            return cls(
                state=d["state"],
                partition=tuple(d["partition"]),
                units=d.get("units", "bits"),
                svn_bits=d["svn_bits"],
                sqc_bits=d["sqc_bits"],
                lower=d["bounds"]["lower"],
                upper=d["bounds"]["upper"],
                classical_verdict=bool(d["classical"]["verdict"]),
                classical_threshold=d["classical"]["threshold"],
                seed=int(d["optimizer"]["seed"]),
                restarts=int(d["optimizer"]["restarts"]),
                best_per_restart=tuple(d["optimizer"]["best_per_restart"]),
                converged=bool(d["optimizer"]["converged"]),
                runtime_seconds=d["runtime_seconds"],
                mutual=d.get("mutual"),
                oracle=d.get("oracle"),
            )
        except (KeyError, TypeError) as exc:
            raise ReportError(f"malformed report: missing or bad {exc}") from None

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "EntropyReport":
        return cls.from_dict(json.loads(text))

    def numeric_fields(self) -> dict[str, Any]:
        """Everything except wall time, for determinism comparisons."""
        d = asdict(self)
        d.pop("runtime_seconds")
        return d

    def csv_row(self) -> dict[str, str]:
        mutual = self.mutual or {}
        values = {
            "state": self.state,
            "partition": "x".join(str(d) for d in self.partition),
            "units": self.units,
            "svn_bits": self.svn_bits,
            "sqc_bits": self.sqc_bits,
            "lower_max": self.lower_max,
            "upper": self.upper,
            "iqm": mutual.get("iqm", ""),
            "icl": mutual.get("icl", ""),
            "gap": mutual.get("gap", ""),
            "classical_verdict": str(self.classical_verdict).lower(),
            "classical_threshold": self.classical_threshold,
            "seed": self.seed,
            "restarts": self.restarts,
            "converged": str(self.converged).lower(),
            "runtime_seconds": self.runtime_seconds,
        }
        return {k: repr(v) if isinstance(v, float) else str(v) for k, v in values.items()}

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
        if header:
            writer.writeheader()
        writer.writerow(self.csv_row())
        return buf.getvalue()


def compute_report(
    spec: StateSpec,
    cfg: OptimizerConfig = OptimizerConfig(),
    log_base: str = "2",
    oracle: bool = False,
    threshold: float = CLASSICAL_THRESHOLD,
) -> EntropyReport:
    """Run every quantity of the report for one state.

    Raises :class:`InternalConsistencyError` if S^QC falls below a proved
    lower bound by more than numerical slack.
    """
    if log_base not in UNITS:
        raise ReportError(f"log base must be one of {sorted(UNITS)}, got {log_base!r}")
    scale = 1.0 if log_base == "2" else math.log(2)
    start = time.perf_counter()
    rho = spec.rho
    svn = von_neumann_entropy(rho)
    value, res = qc_entropy(rho, cfg)
    lower = qc_lower_bounds(rho)
    upper = qc_upper_bound(rho)
    worst = max(lower.values(), default=0.0)
    if value < worst - BOUND_SLACK:
        raise InternalConsistencyError(f"S^QC = {value:.9g} bits lies below the lower bound {worst:.9g} bits")
    mutual = None
    if len(rho.dims) == 2:
        iqm = quantum_mutual_information(rho)
        icl = classical_mutual_information(rho, cfg)
        mutual = {"iqm": iqm * scale, "icl": icl * scale, "gap": (iqm - icl) * scale}
    verdict = is_classically_correlated(rho, cfg, threshold, computed=(value, res))
    extra = None
    if oracle:
        if rho.dim <= MAX_DIM:
            bf = brute_force_qc(rho, seed=cfg.seed)
            extra = {"sqc_bits": bf * scale, "difference": (value - bf) * scale}
        else:
            extra = {"skipped": f"dimension {rho.dim} exceeds {MAX_DIM}"}
    return EntropyReport(
        state=spec.descriptor,
        partition=rho.dims,
        units=UNITS[log_base],
        svn_bits=svn * scale,
        sqc_bits=value * scale,
        lower={subset_key(k): v * scale for k, v in lower.items()},
        upper=upper * scale,
        classical_verdict=verdict.classical,
        classical_threshold=threshold * scale,
        seed=cfg.seed,
        restarts=cfg.restarts,
        best_per_restart=tuple(v * scale for v in res.best_per_restart),
        converged=res.converged,
        runtime_seconds=time.perf_counter() - start,
        mutual=mutual,
        oracle=extra,
    )
