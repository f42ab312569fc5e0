"""Command line behavior: verbs, exit codes, reports, config handling."""

import json
from pathlib import Path

import pytest

from jsdeg.cli import main

FIXTURES = Path(__file__).parent / "fixtures"
CATALOGUE = str(FIXTURES / "catalogue")
CERTS = str(FIXTURES / "certificates")


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_check_valid_catalogue(capsys):
    code, out, _ = run(capsys, "check", "--catalogue", CATALOGUE)
    assert code == 0
    assert "2/2 entries valid" in out


def test_check_reports_bad_entry(tmp_path, capsys):
    (tmp_path / "ok.alg").write_text("id a\ntype 1 0\n")
    (tmp_path / "bad.alg").write_text("id b\ntype 1 0\nprod e1 e9 = 1 e1\n")
    code, out, _ = run(capsys, "check", "--catalogue", str(tmp_path))
    assert code == 1
    assert "FAIL" in out and "1/2 entries valid" in out


def test_act_constant_change(capsys):
    code, out, _ = run(capsys, "act", str(FIXTURES / "half.chg"),
                       "--catalogue", CATALOGUE)
    assert code == 0
    assert "id (1,0)_idem_moved" in out
    assert "prod e1 e1 = 1/2 e1" in out


def test_act_rejects_curves(capsys):
    code, _, err = run(capsys, "act", str(FIXTURES / "curve.chg"),
                       "--catalogue", CATALOGUE)
    assert code == 2
    assert "witness" in err


def test_witness_confirmed(capsys):
    code, out, _ = run(capsys, "witness", str(FIXTURES / "scale.wit"),
                       "--catalogue", CATALOGUE)
    assert code == 0
    assert "confirmed" in out


def test_witness_mismatch(capsys):
    code, out, _ = run(capsys, "witness", str(FIXTURES / "scale.wit"),
                       str(FIXTURES / "bad.wit"), "--catalogue", CATALOGUE)
    assert code == 1
    assert "confirmed" in out and "limit-mismatch" in out


def test_certify_non_degeneration(capsys):
    code, out, _ = run(capsys, "certify", str(FIXTURES / "certificates" / "nilpotent.cert"),
                       "--catalogue", CATALOGUE)
    assert code == 0
    assert "zero !-> idem: non-degeneration" in out
    assert "pairs: 1 (non-degeneration: 1)" in out


def test_certify_refuted(capsys):
    code, out, _ = run(capsys, "certify", str(FIXTURES / "certificates" / "reversed.cert"),
                       "--catalogue", CATALOGUE)
    assert code == 1
    assert "idem !-> zero: refuted" in out


def test_batch_skips_missing_ids(capsys):
    code, out, _ = run(capsys, "batch", "--catalogue", CATALOGUE,
                       "--certificates", str(FIXTURES / "missing.cert"))
    assert code == 1
    assert "ghost !-> idem: skipped" in out
    assert "no entry for 'ghost'" in out
    # the resolvable pair still gets its full verdict
    assert "zero !-> idem: non-degeneration" in out


def test_batch_jsonl_report(tmp_path, capsys):
    path = tmp_path / "report.jsonl"
    code, out, _ = run(capsys, "batch", "--catalogue", CATALOGUE,
                       "--certificates", CERTS, "--jsonl", str(path))
    assert code == 1  # reversed.cert refutes
    lines = [json.loads(x) for x in path.read_text().splitlines()]
    records, tail = lines[:-1], lines[-1]
    assert {r["outcome"] for r in records} == {"non-degeneration", "refuted"}
    counted = {}
    for r in records:
        counted[r["outcome"]] = counted.get(r["outcome"], 0) + 1
    assert tail["summary"] == counted
    assert tail["config"]["orientation"] == "both"
    for r in records:
        assert set(r) >= {"certificate", "source", "target", "outcome",
                          "timings", "digest"}


def test_config_file_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"orientation": "lower", "max-seconds": 30,
                               "catalogue": CATALOGUE}))
    path = tmp_path / "report.jsonl"
    code, _, _ = run(capsys, "certify", str(FIXTURES / "certificates" / "nilpotent.cert"),
                     "--config", str(cfg), "--orientation", "upper",
                     "--jsonl", str(path))
    assert code == 0
    tail = json.loads(path.read_text().splitlines()[-1])
    assert tail["config"]["orientation"] == "upper"  # flag wins
    assert tail["config"]["max_seconds"] == 30  # file beats default


def test_config_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"max-secnods": 30}))
    code, _, err = run(capsys, "certify", str(FIXTURES / "certificates" / "nilpotent.cert"),
                       "--config", str(cfg), "--catalogue", CATALOGUE)
    assert code == 2
    assert "max-secnods" in err


def test_missing_certificate_file(capsys):
    code, _, err = run(capsys, "certify", "/nonexistent/x.cert",
                       "--catalogue", CATALOGUE)
    assert code == 2
    assert "error" in err


def test_no_arguments_is_usage_error(capsys):
    assert main([]) == 2
    capsys.readouterr()


def test_repeat_runs_identical(tmp_path, capsys):
    def snapshot(path):
        rows = [json.loads(x) for x in Path(path).read_text().splitlines()]
        for row in rows:
            row.pop("timings", None)
        return rows

    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    for path in (a, b):
        code, _, _ = run(capsys, "batch", "--catalogue", CATALOGUE,
                         "--certificates", CERTS, "--jsonl", str(path))
        assert code == 1
    assert snapshot(a) == snapshot(b)


def test_stability_verb(capsys):
    code, out, _ = run(capsys, "stability",
                       "--certificates", str(FIXTURES / "certificates" / "nilpotent.cert"))
    assert code == 0
    assert "nilpotent: stable" in out
    assert "1/1 certificate sets stable" in out


def test_jobs_flag_matches_serial(tmp_path, capsys):
    serial, parallel = tmp_path / "s.jsonl", tmp_path / "p.jsonl"
    run(capsys, "batch", "--catalogue", CATALOGUE, "--certificates", CERTS,
        "--jsonl", str(serial))
    run(capsys, "batch", "--catalogue", CATALOGUE, "--certificates", CERTS,
        "--jsonl", str(parallel), "--jobs", "2")
    strip = lambda rows: [
        {k: v for k, v in json.loads(r).items() if k not in ("timings", "config")}
        for r in rows.read_text().splitlines()
    ]
    assert strip(serial) == strip(parallel)
