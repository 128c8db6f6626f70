"""Command-line front end.

    qcentropy compute --state bell.json
    qcentropy compute --state named:two_bell --groups "0,2;1,3"
    qcentropy bounds --state named:example_b
    qcentropy verify --suite examples
    qcentropy report --state named:example_b --output out.csv --format csv

Exit codes: 0 success, 1 verification failure, 2 parse or usage error,
3 invalid state or coarse-graining, 4 internal consistency violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .coarse import InvalidCoarseGrainingError
from .entropy import von_neumann_entropy
from .optimize import InternalConsistencyError, OptimizerConfig, qc_lower_bounds, qc_upper_bound
from .report import CSV_FIELDS, UNITS, EntropyReport, ReportError, compute_report, sig, subset_key
from .specs import SpecError, StateSpec, load_state
from .states import InvalidStateError
from .verify import SUITES, run_suites

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_PARSE = 2
EXIT_INVALID = 3
EXIT_INTERNAL = 4

# older name of the examples suite, still accepted
SUITE_ALIASES = {"paper-examples": "examples"}


class OutputError(OSError):
    pass


def _dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if any(d < 2 for d in dims):
        raise argparse.ArgumentTypeError("subsystem dimensions must be >= 2")
    return dims


def _groups(text: str) -> list[list[int]]:
    try:
        return [[int(x) for x in g.split(",")] for g in text.split(";")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected groups like '0,2;1,3', got {text!r}") from None


def _nonnegative(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    state = argparse.ArgumentParser(add_help=False)
    state.add_argument("--state", required=True, help="state spec JSON path, or named:<bell|ghz:N|two_bell|example_b>")
    state.add_argument("--partition", type=_dims, help="comma-separated subsystem dims, overrides the state file")
    state.add_argument("--groups", type=_groups, help="regroup subsystems first, e.g. '0,2;1,3'")
    state.add_argument("--log-base", choices=sorted(UNITS), default="2", help="entropy log base (default 2)")

    search = argparse.ArgumentParser(add_help=False)
    search.add_argument("--seed", type=_nonnegative, default=0, help="optimizer seed (default 0)")
    search.add_argument("--restarts", type=_positive, default=32, help="optimizer restarts (default 32)")
    search.add_argument("--oracle", action="store_true", help="also run the brute-force oracle (dim <= 16)")

    parser = argparse.ArgumentParser(prog="qcentropy", description="Quantum correlation entropy of multipartite states.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", parents=[state, search], help="S^QC, bounds and mutual information for one state")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", help="write the report here instead of standard output")

    p = sub.add_parser("bounds", parents=[state], help="lower and upper bounds, no optimization")
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument(
        "--suite", action="append", choices=sorted(SUITES) + sorted(SUITE_ALIASES) + ["all"], help="suite to run (repeatable, default all)"
    )
    p.add_argument("--seed", type=_nonnegative, default=0)
    p.add_argument("--restarts", type=_positive, default=32)

    p = sub.add_parser("report", parents=[state, search], help="write a report file")
    p.add_argument("--output", required=True)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--append", action="store_true", help="csv only: add a row to an existing file")
    return parser


def _spec(args) -> StateSpec:
    return load_state(args.state, partition=args.partition, groups=args.groups)


def _write(path: str, text: str, append: bool = False) -> None:
    try:
        with open(path, "a" if append else "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from None


def _report(args) -> EntropyReport:
    cfg = OptimizerConfig(restarts=args.restarts, seed=args.seed)
    return compute_report(_spec(args), cfg, log_base=args.log_base, oracle=args.oracle)


def cmd_compute(args) -> int:
    r = _report(args)
    text = r.to_json() if args.format == "json" else r.to_csv()
    if args.output:
        _write(args.output, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_bounds(args) -> int:
    spec = _spec(args)
    rho = spec.rho
    scale = 1.0 if args.log_base == "2" else 0.6931471805599453
    lower = {subset_key(k): sig(v * scale) for k, v in qc_lower_bounds(rho).items()}
    upper = sig(qc_upper_bound(rho) * scale)
    if args.format == "json":
        doc = {
            "state": spec.descriptor,
            "partition": list(rho.dims),
            "units": UNITS[args.log_base],
            "svn_bits": sig(von_neumann_entropy(rho) * scale),
            "lower": lower,
            "upper": upper,
        }
        sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["bound", "subset", "value"])
        for k, v in lower.items():
            w.writerow(["lower", k, repr(v)])
        w.writerow(["upper", "", repr(upper)])
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def cmd_verify(args) -> int:
    names = args.suite or ["all"]
    if "all" in names:
        names = list(SUITES)
    names = list(dict.fromkeys(SUITE_ALIASES.get(n, n) for n in names))
    results = run_suites(names, seed=args.seed, restarts=args.restarts, emit=lambda s: print(s, flush=True))
    failed = [c.id for c in results if not c.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    if failed:
        print("violated: " + ", ".join(failed), file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_report(args) -> int:
    r = _report(args)
    if args.format == "json":
        if args.append:
            raise SpecError("--append only applies to csv reports", "append", source="command line")
        _write(args.output, r.to_json())
        return EXIT_OK
    path = Path(args.output)
    header = True
    if args.append and path.exists() and path.stat().st_size > 0:
        try:
            first = path.read_text(encoding="utf-8").splitlines()[0]
        except OSError as exc:
            raise OutputError(f"cannot read {path}: {exc.strerror or exc}") from None
        if first != ",".join(CSV_FIELDS):
            raise OutputError(f"cannot append to {path}: header differs from the report columns")
        header = False
    _write(args.output, r.to_csv(header=header), append=args.append)
    return EXIT_OK


COMMANDS = {"compute": cmd_compute, "bounds": cmd_bounds, "verify": cmd_verify, "report": cmd_report}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OutputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InvalidStateError as exc:
        print(f"error: invalid state, violated invariant {exc}", file=sys.stderr)
        return EXIT_INVALID
    except InvalidCoarseGrainingError as exc:
        print(f"error: invalid coarse-graining: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (InternalConsistencyError, ReportError) as exc:
        print(f"error: internal consistency violation: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
