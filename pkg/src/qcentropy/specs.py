"""JSON ingestion for state and coarse-graining specs.

State spec::

    {"dims": [2, 2], "pure": [[re, im], ...]}
    {"dims": [2, 2], "density": [[re, im], ...]}          # row-major, dim*dim entries
    {"dims": [2, 2], "classical": {"probs": [...], "bases": [U_A, U_B]}}
    {"named": "ghz:4", "groups": [[0, 2], [1, 3]]}

Exactly one of ``pure``, ``density``, ``classical`` or ``named`` must be
present. ``dims`` is required except for named states, where it (or
``groups``) may regroup the named state's qubits. Matrices are lists of rows
of [re, im] pairs, or flat row-major lists of pairs; a bare number is a real
entry.

Coarse-graining spec::

    {"dims": [2, 2], "basis_point": [U_A, U_B]}
    {"dims": [4], "projectors": [P_1, P_2, ...]}

Structural problems raise :class:`SpecError` carrying the source, field and
(where it can be located) line. Physical invariant failures are left to the
constructors and surface as ``InvalidStateError`` or
``InvalidCoarseGrainingError``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Sequence, Union

import numpy as np

from .coarse import CoarseGraining, LocalCoarseGraining, basis_cg, require_valid
from .states import (
    DensityMatrix,
    PartitionSpec,
    PureState,
    classical_state,
    density_from_pure,
    named_state,
    regroup,
)

STATE_KINDS = ("pure", "density", "classical", "named")
NAMED_PREFIX = "named:"


class SpecError(ValueError):
    """Malformed spec; ``field`` and ``line`` locate the problem when known."""

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None, source: str = "<spec>"):
        self.message = message
        self.field = field
        self.line = line
        self.source = source
        where = source if line is None else f"{source}:{line}"
        what = f"field '{field}': " if field else ""
        super().__init__(f"{where}: {what}{message}")


@dataclass(frozen=True, eq=False)
class StateSpec:
    descriptor: str
    rho: DensityMatrix


class _Reader:
    def __init__(self, text: str, source: str):
        self.text = text
        self.source = source

    def line_of(self, field: str) -> Optional[int]:
        m = re.search(r'"' + re.escape(field) + r'"\s*:', self.text)
        return None if m is None else self.text.count("\n", 0, m.start()) + 1

    def error(self, field: Optional[str], message: str) -> SpecError:
        key = field.split(".")[0].split("[")[0] if field else None
        return SpecError(message, field, self.line_of(key) if key else None, self.source)

    def load(self) -> dict:
        try:
            doc = json.loads(self.text)
        except json.JSONDecodeError as exc:
            raise SpecError(f"invalid JSON: {exc.msg} (column {exc.colno})", None, exc.lineno, self.source) from None
        if not isinstance(doc, dict):
            raise SpecError("top level must be a JSON object", None, 1, self.source)
        return doc

    def dims(self, value: Any, field: str = "dims") -> tuple[int, ...]:
        if not isinstance(value, list) or not value:
            raise self.error(field, "must be a nonempty list of integers")
        if not all(isinstance(d, int) and not isinstance(d, bool) for d in value):
            raise self.error(field, "entries must be integers")
        if any(d < 2 for d in value):
            raise self.error(field, "every subsystem dimension must be >= 2")
        return tuple(value)

    def scalar(self, value: Any, field: str) -> complex:
        if isinstance(value, bool):
            raise self.error(field, "booleans are not numbers")
        if isinstance(value, (int, float)):
            return complex(value)
        if (
            isinstance(value, list)
            and len(value) == 2
            and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in value)
        ):
            return complex(value[0], value[1])
        raise self.error(field, f"expected a number or an [re, im] pair, got {json.dumps(value)[:40]}")

    def vector(self, value: Any, field: str, size: Optional[int] = None) -> np.ndarray:
        if not isinstance(value, list):
            raise self.error(field, "must be a list")
        out = np.array([self.scalar(v, f"{field}[{k}]") for k, v in enumerate(value)], dtype=complex)
        if size is not None and out.size != size:
            raise self.error(field, f"expected {size} entries, got {out.size}")
        return out

    def matrix(self, value: Any, field: str, dim: Optional[int] = None) -> np.ndarray:
        """Rows of [re, im] pairs, rows of real numbers, or a flat row-major list of pairs or numbers."""
        if not isinstance(value, list) or not value:
            raise self.error(field, "must be a nonempty list")
        n_flat = int(round(np.sqrt(len(value))))
        flat_ok = n_flat * n_flat == len(value) and all(not isinstance(v, list) or _is_pair(v) for v in value)
        if flat_ok:
            m = self.vector(value, field).reshape(n_flat, n_flat)
        elif all(isinstance(row, list) for row in value):
            rows = [self.vector(row, f"{field}[{k}]") for k, row in enumerate(value)]
            if any(r.size != len(rows) for r in rows):
                raise self.error(field, "rows must all have length equal to the number of rows")
            m = np.stack(rows)
        else:
            raise self.error(field, f"{len(value)} entries do not form a square matrix")
        if dim is not None and m.shape[0] != dim:
            raise self.error(field, f"expected a {dim}x{dim} matrix, got {m.shape[0]}x{m.shape[0]}")
        return m


def _is_number(v: Any) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _is_pair(v: Any) -> bool:
    return isinstance(v, list) and len(v) == 2 and all(_is_number(x) for x in v)


def _state_from_doc(doc: dict, r: _Reader) -> DensityMatrix:
    present = [k for k in STATE_KINDS if k in doc]
    if len(present) != 1:
        where = present[1] if len(present) > 1 else None
        raise r.error(where, f"exactly one of {', '.join(STATE_KINDS)} is required, found {present or 'none'}")
    unknown = set(doc) - set(STATE_KINDS) - {"dims", "groups"}
    if unknown:
        raise r.error(sorted(unknown)[0], "unknown field")
    kind = present[0]
    dims = r.dims(doc["dims"]) if "dims" in doc else None

    if kind == "named":
        if not isinstance(doc["named"], str):
            raise r.error("named", "must be a string")
        try:
            rho = named_state(doc["named"])
        except ValueError as exc:
            raise r.error("named", str(exc)) from None
    else:
        if dims is None:
            raise r.error("dims", "required unless the state is named")
        if "groups" in doc:
            raise r.error("groups", "only allowed with named states")
        total = int(np.prod(dims))
        if kind == "pure":
            rho = density_from_pure(PureState(r.vector(doc["pure"], "pure", total), PartitionSpec(dims)))
        elif kind == "density":
            rho = DensityMatrix(r.matrix(doc["density"], "density", total), PartitionSpec(dims))
        else:
            spec = doc["classical"]
            if not isinstance(spec, dict) or "probs" not in spec:
                raise r.error("classical", "must be an object with 'probs' and optional 'bases'")
            probs = r.vector(spec["probs"], "classical.probs", total)
            if np.any(np.abs(probs.imag) > 0):
                raise r.error("classical.probs", "probabilities must be real")
            bases = None
            if spec.get("bases") is not None:
                raw = spec["bases"]
                if not isinstance(raw, list) or len(raw) != len(dims):
                    raise r.error("classical.bases", f"need one matrix per subsystem ({len(dims)})")
                bases = [r.matrix(b, f"classical.bases[{k}]", d) for k, (b, d) in enumerate(zip(raw, dims))]
            rho = classical_state(probs.real, bases=bases, dims=dims)
        return rho

    return _regroup_named(rho, doc, dims, r)


def _regroup_named(rho: DensityMatrix, doc: dict, dims: Optional[tuple[int, ...]], r: _Reader) -> DensityMatrix:
    if "groups" in doc:
        groups = doc["groups"]
        if not isinstance(groups, list) or not all(
            isinstance(g, list) and g and all(isinstance(i, int) for i in g) for g in groups
        ):
            raise r.error("groups", "must be a list of nonempty integer lists")
        rho = regroup(rho, groups)
    if dims is not None:
        if int(np.prod(dims)) != rho.dim:
            raise r.error("dims", f"product {int(np.prod(dims))} does not match state dimension {rho.dim}")
        rho = rho.with_partition(dims)
    return rho


def parse_state(text: str, source: str = "<spec>") -> DensityMatrix:
    r = _Reader(text, source)
    return _state_from_doc(r.load(), r)


def _read_text(path: Union[str, Path]) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecError(f"cannot read spec: {exc.strerror or exc}", source=str(path)) from None


def load_state(
    source: str,
    partition: Optional[Sequence[int]] = None,
    groups: Optional[Sequence[Sequence[int]]] = None,
) -> StateSpec:
    """Read a spec file, or resolve ``named:<name>`` without a file.

    ``groups`` regroups subsystems first; ``partition`` then overrides the
    subsystem dimensions (their product must match).
    """
    if source.startswith(NAMED_PREFIX):
        name = source[len(NAMED_PREFIX) :]
        try:
            rho = named_state(name)
        except ValueError as exc:
            raise SpecError(str(exc), "named", source=source) from None
    else:
        rho = parse_state(_read_text(source), source)
    if groups is not None:
        rho = regroup(rho, groups)
    if partition is not None:
        partition = tuple(int(d) for d in partition)
        if int(np.prod(partition)) != rho.dim:
            raise SpecError(
                f"partition {list(partition)} has dimension {int(np.prod(partition))}, state has {rho.dim}",
                "partition",
                source=source,
            )
        rho = rho.with_partition(partition)
    return StateSpec(source, rho)


def parse_coarse_graining(text: str, source: str = "<spec>") -> Union[LocalCoarseGraining, CoarseGraining]:
    """A :class:`LocalCoarseGraining` from ``basis_point``, or a :class:`CoarseGraining` from ``projectors``."""
    r = _Reader(text, source)
    doc = r.load()
    present = [k for k in ("basis_point", "projectors") if k in doc]
    if len(present) != 1:
        where = present[1] if len(present) > 1 else None
        raise r.error(where, f"exactly one of basis_point, projectors is required, found {present or 'none'}")
    if "dims" not in doc:
        raise r.error("dims", "required")
    dims = r.dims(doc["dims"])
    unknown = set(doc) - {"dims", "basis_point", "projectors"}
    if unknown:
        raise r.error(sorted(unknown)[0], "unknown field")
    if "basis_point" in doc:
        raw = doc["basis_point"]
        if not isinstance(raw, list) or len(raw) != len(dims):
            raise r.error("basis_point", f"need one unitary per subsystem ({len(dims)})")
        mats = [r.matrix(u, f"basis_point[{k}]", d) for k, (u, d) in enumerate(zip(raw, dims))]
        return LocalCoarseGraining(tuple(basis_cg(u) for u in mats), PartitionSpec(dims))
    raw = doc["projectors"]
    if not isinstance(raw, list) or not raw:
        raise r.error("projectors", "must be a nonempty list of matrices")
    total = int(np.prod(dims))
    cg = CoarseGraining(tuple(r.matrix(p, f"projectors[{k}]", total) for k, p in enumerate(raw)), total)
    require_valid(cg)
    return cg


def load_coarse_graining(path: Union[str, Path]) -> Union[LocalCoarseGraining, CoarseGraining]:
    return parse_coarse_graining(_read_text(path), str(path))
