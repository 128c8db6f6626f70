import csv
import io
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qcentropy.optimize import OptimizerConfig
from qcentropy.report import CSV_FIELDS, EntropyReport, ReportError, compute_report, sig
from qcentropy.specs import load_state

FAST = OptimizerConfig(restarts=4)


@pytest.fixture(scope="module")
def bell_report():
    return compute_report(load_state("named:bell"), FAST, oracle=True)


def test_sig_rounds_and_snaps():
    assert sig(1 / 3) == 0.333333333
    assert sig(1.23456789012e-5) == 1.23456789e-05
    assert sig(3e-13) == 0.0
    assert math.copysign(1, sig(-0.0)) == 1
    with pytest.raises(ReportError):
        sig(float("nan"))


@given(st.floats(allow_nan=False, allow_infinity=False, min_value=-1e6, max_value=1e6))
def test_sig_idempotent(x):
    assert sig(sig(x)) == sig(x)
    assert len(repr(sig(x)).replace("-", "").replace(".", "").split("e")[0].strip("0")) <= 9


def test_bell_values(bell_report):
    r = bell_report
    assert r.sqc_bits == pytest.approx(1, abs=1e-6)
    assert r.svn_bits == 0
    assert r.lower == {"0": 1.0, "1": 1.0} and r.upper == 2.0
    assert r.mutual["iqm"] == 2.0 and r.mutual["icl"] == pytest.approx(1, abs=1e-6)
    assert r.classical_verdict is False
    assert len(r.best_per_restart) == 4
    assert r.oracle["sqc_bits"] == pytest.approx(1, abs=1e-6)


def test_json_round_trip(bell_report):
    again = EntropyReport.from_json(bell_report.to_json())
    assert again == bell_report
    assert again.to_json() == bell_report.to_json()


def test_json_schema_keys(bell_report):
    d = bell_report.to_dict()
    for key in ("state", "partition", "svn_bits", "sqc_bits", "bounds", "mutual", "classical", "optimizer", "runtime_seconds"):
        assert key in d
    assert set(d["bounds"]) >= {"lower", "upper"}
    assert set(d["optimizer"]) == {"seed", "restarts", "best_per_restart", "converged"}


def test_csv(bell_report):
    text = bell_report.to_csv()
    rows = list(csv.DictReader(io.StringIO(text)))
    assert tuple(rows[0]) == CSV_FIELDS
    assert float(rows[0]["sqc_bits"]) == bell_report.sqc_bits
    assert bell_report.to_csv(header=False).count("\n") == 1


def test_nats():
    r = compute_report(load_state("named:bell"), FAST, log_base="e")
    assert r.units == "nats" and r.upper == pytest.approx(2 * math.log(2), abs=1e-8)


def test_no_mutual_for_three_parties():
    r = compute_report(load_state("named:ghz:3"), FAST)
    assert r.mutual is None and "mutual" not in r.to_dict()


def test_rejects_negative_entropy(bell_report):
    d = bell_report.to_dict()
    d["sqc_bits"] = -0.1
    with pytest.raises(ReportError):
        EntropyReport.from_dict(d)


def test_malformed(bell_report):
    d = bell_report.to_dict()
    del d["bounds"]
    with pytest.raises(ReportError):
        EntropyReport.from_dict(d)


def test_determinism_ignores_runtime():
    a = compute_report(load_state("named:example_b"), FAST)
    b = compute_report(load_state("named:example_b"), FAST)
    assert a.numeric_fields() == b.numeric_fields()
