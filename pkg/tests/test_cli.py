import csv
import json

import pytest

from logitstab.cli import (
    EXIT_CAP,
    EXIT_DISAGREE,
    EXIT_OK,
    EXIT_PARSE,
    main,
)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


TRIANGLE_GOLDEN = {
    "optimum": "3",
    "poa": "4/3",
    "pos": "1",
    "logit_poa": "4/3",
    "logit_pos": "1",
    "ind_logit_poa": "5/3",
    "ind_logit_pos": "1",
    "nash": [0, 1, 2],
    "strict_nash": [],
    "potential_minimizers": [0, 1, 2],
    "stable_independent": [0, 1, 2, 3],
    "stable_asynchronous": [0, 1, 2],
    "contains_non_nash_stable": True,
}

LB_UNIT_22_GOLDEN = {
    "optimum": "2",
    "ind_logit_poa": "3/2",
    "ind_logit_pos": "1",
    "stable_independent": [0, 1, 2, 3, 4, 5, 6, 7],
    "contains_non_nash_stable": True,
}


def test_analyze_triangle_golden(capsys):
    code, out, _ = run(capsys, "analyze", "--builtin", "triangle")
    assert code == EXIT_OK
    report = json.loads(out)
    for key, want in TRIANGLE_GOLDEN.items():
        assert report[key] == want, key


def test_analyze_lb_unit_golden(capsys):
    code, out, _ = run(capsys, "analyze", "--builtin", "lb-unit", "--m", "2", "--l", "2")
    assert code == EXIT_OK
    report = json.loads(out)
    for key, want in LB_UNIT_22_GOLDEN.items():
        assert report[key] == want, key


def test_analyze_out_and_csv(capsys, tmp_path):
    out_json = tmp_path / "report.json"
    out_csv = tmp_path / "states.csv"
    code, _, _ = run(
        capsys,
        "analyze", "--builtin", "triangle",
        "--out", str(out_json), "--csv", str(out_csv),
    )
    assert code == EXIT_OK
    report = json.loads(out_json.read_text())
    assert report["ind_logit_poa"] == "5/3"
    with open(out_csv, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 4
    assert rows[3]["is_nash"] == "False"


def test_instance_roundtrip(capsys, tmp_path):
    path = tmp_path / "triangle.json"
    code, _, _ = run(capsys, "instance", "triangle", "--out", str(path))
    assert code == EXIT_OK
    code, out_file, _ = run(capsys, "analyze", "--file", str(path))
    assert code == EXIT_OK
    code, out_builtin, _ = run(capsys, "analyze", "--builtin", "triangle")
    assert code == EXIT_OK
    assert json.loads(out_file) == json.loads(out_builtin)


def test_instance_parallel(capsys, tmp_path):
    path = tmp_path / "links.json"
    code, _, _ = run(
        capsys, "instance", "parallel", "--costs", "1,2", "--players", "3",
        "--out", str(path),
    )
    assert code == EXIT_OK
    data = json.loads(path.read_text())
    assert data["type"] == "parallel_links"
    assert data["costs"] == ["1", "2"]


def test_verify_triangle_agrees(capsys):
    code, out, _ = run(capsys, "verify", "--builtin", "triangle")
    assert code == EXIT_OK
    verdict = json.loads(out)
    assert verdict["agree"] is True
    assert verdict["stable_exact"] == [0, 1, 2, 3]
    assert verdict["persisting_numeric"] == [0, 1, 2, 3]


def test_verify_asynchronous(capsys):
    code, out, _ = run(capsys, "verify", "--builtin", "triangle", "--revision", "async")
    assert code == EXIT_OK
    assert json.loads(out)["stable_exact"] == [0, 1, 2]


def test_simulate_deterministic_csv(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        code, _, _ = run(
            capsys,
            "simulate", "--builtin", "triangle", "--beta", "1.0",
            "--steps", "20000", "--seed", "11", "--out", str(path),
        )
        assert code == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_report_writes_default_csv(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, out, _ = run(capsys, "report", "--builtin", "triangle")
    assert code == EXIT_OK
    assert json.loads(out)["poa"] == "4/3"
    assert (tmp_path / "states.csv").exists()


class TestExitCodes:
    def test_unparseable_file(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{oops")
        code, _, err = run(capsys, "analyze", "--file", str(path))
        assert code == EXIT_PARSE
        assert "error" in err

    def test_bad_schema(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"type": "mystery"}))
        code, _, _ = run(capsys, "analyze", "--file", str(path))
        assert code == EXIT_PARSE

    def test_missing_builtin_params(self, capsys):
        code, _, _ = run(capsys, "analyze", "--builtin", "lb-unit")
        assert code == EXIT_PARSE

    def test_both_sources_rejected(self, capsys, tmp_path):
        path = tmp_path / "g.json"
        path.write_text("{}")
        code, _, _ = run(capsys, "analyze", "--builtin", "triangle", "--file", str(path))
        assert code == EXIT_PARSE

    def test_state_cap(self, capsys, monkeypatch):
        monkeypatch.setenv("STABILITY_STATE_CAP", "2")
        code, _, err = run(capsys, "analyze", "--builtin", "triangle")
        assert code == EXIT_CAP
        assert "error" in err

    def test_verify_disagreement_exit(self, capsys, monkeypatch):
        # force a mismatch by stubbing out the numeric side
        import numpy as np

        import logitstab.cli as cli

        fake = type("E", (), {"persisting": set(), "slopes": np.full(4, -9.0)})()
        monkeypatch.setattr(cli, "numeric_stable_estimate", lambda *a, **k: fake)
        code, out, _ = run(capsys, "verify", "--builtin", "triangle")
        assert code == EXIT_DISAGREE
