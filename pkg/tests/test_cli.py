import csv
import json

import pytest

from qcentropy.cli import main

S = 0.7071067811865476


def _write(path, doc):
    path.write_text(json.dumps(doc, indent=2))
    return str(path)


@pytest.fixture
def bell_file(tmp_path):
    return _write(tmp_path / "bell.json", {"dims": [2, 2], "pure": [[S, 0], [0, 0], [0, 0], [S, 0]]})


def test_compute_json(bell_file, capsys):
    assert main(["compute", "--state", bell_file, "--restarts", "4"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["sqc_bits"] == pytest.approx(1, abs=1e-6)
    assert out["state"] == bell_file


def test_compute_product(tmp_path, capsys):
    path = _write(tmp_path / "product.json", {"dims": [2, 2], "pure": [S, S, 0, 0]})
    assert main(["compute", "--state", path, "--restarts", "4"]) == 0
    assert json.loads(capsys.readouterr().out)["sqc_bits"] == pytest.approx(0, abs=1e-6)


def test_compute_named_groups_csv(capsys):
    assert main(["compute", "--state", "named:two_bell", "--groups", "0,2;1,3", "--format", "csv", "--restarts", "4"]) == 0
    row = next(csv.DictReader(capsys.readouterr().out.splitlines()))
    assert row["partition"] == "4x4" and float(row["sqc_bits"]) < 1e-6


def test_compute_output_file(bell_file, tmp_path):
    out = tmp_path / "r.json"
    assert main(["compute", "--state", bell_file, "--restarts", "2", "--output", str(out)]) == 0
    assert json.loads(out.read_text())["partition"] == [2, 2]


def test_bounds(capsys):
    assert main(["bounds", "--state", "named:example_b"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["upper"] == pytest.approx(0.60088, abs=1e-5)
    assert doc["lower"] == {"0": 0.0, "1": 0.0}


def test_bounds_csv(capsys):
    assert main(["bounds", "--state", "named:bell", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "bound,subset,value"
    assert "upper,,2.0" in lines


def test_bounds_classical(tmp_path, capsys):
    path = _write(tmp_path / "classical.json", {"dims": [2, 2], "classical": {"probs": [0.5, 0, 0, 0.5]}})
    assert main(["bounds", "--state", path]) == 0
    assert json.loads(capsys.readouterr().out)["lower"] == {"0": 0.0, "1": 0.0}


def test_parse_error_exit_2(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "dims": [2, 2],\n  "pure": [1, 0, 0]\n}')
    assert main(["compute", "--state", str(path)]) == 2
    err = capsys.readouterr().err
    assert "bad.json:3" in err and "'pure'" in err


def test_missing_file_exit_2(tmp_path):
    assert main(["compute", "--state", str(tmp_path / "nope.json")]) == 2


def test_usage_error_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["compute"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["compute", "--state", "named:bell", "--partition", "2,x"])
    assert exc.value.code == 2


def test_invalid_state_exit_3(tmp_path, capsys):
    path = _write(tmp_path / "trace.json", {"dims": [2], "density": [[1, 0], [0, 1]]})
    assert main(["compute", "--state", path]) == 3
    assert "trace" in capsys.readouterr().err


def test_report_json_and_csv_append(tmp_path):
    out = tmp_path / "r.csv"
    args = ["report", "--state", "named:bell", "--restarts", "2", "--output", str(out), "--format", "csv"]
    assert main(args) == 0
    assert main(args + ["--append"]) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 2
    js = tmp_path / "r.json"
    assert main(["report", "--state", "named:bell", "--restarts", "2", "--output", str(js)]) == 0
    assert "sqc_bits" in json.loads(js.read_text())


def test_report_unwritable_exit_2(tmp_path):
    target = tmp_path / "missing_dir" / "r.json"
    assert main(["report", "--state", "named:bell", "--restarts", "2", "--output", str(target)]) == 2


def test_report_append_header_mismatch(tmp_path):
    out = tmp_path / "r.csv"
    out.write_text("a,b\n1,2\n")
    assert main(["report", "--state", "named:bell", "--restarts", "2", "--output", str(out), "--format", "csv", "--append"]) == 2


def test_internal_consistency_exit_4(monkeypatch, capsys):
    import qcentropy.report as report

    monkeypatch.setattr(report, "qc_entropy", lambda rho, cfg: (0.0, None))
    assert main(["compute", "--state", "named:bell"]) == 4
    assert "internal consistency" in capsys.readouterr().err


def test_verify_pass_and_fail(monkeypatch, capsys):
    import qcentropy.cli as cli
    from qcentropy.verify import Check

    monkeypatch.setattr(cli, "run_suites", lambda names, seed, restarts, emit: [Check("a", True, "ok")])
    assert main(["verify", "--suite", "examples"]) == 0
    monkeypatch.setattr(cli, "run_suites", lambda names, seed, restarts, emit: [Check("sandwich", False, "bad")])
    assert main(["verify"]) == 1
    assert "sandwich" in capsys.readouterr().err


def test_verify_alias(monkeypatch):
    import qcentropy.cli as cli

    seen = []
    monkeypatch.setattr(cli, "run_suites", lambda names, seed, restarts, emit: seen.extend(names) or [])
    assert main(["verify", "--suite", "paper-examples", "--suite", "examples"]) == 0
    assert seen == ["examples"]


def test_determinism_byte_identical(tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"r{k}.json"
        assert main(["compute", "--state", "named:example_b", "--seed", "7", "--restarts", "4", "--output", str(path)]) == 0
        doc = json.loads(path.read_text())
        doc.pop("runtime_seconds")
        outs.append(json.dumps(doc))
    assert outs[0] == outs[1]
