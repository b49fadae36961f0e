import json
import re

import pytest

from liechain import certfile, cli
from liechain.criterion import search_counterexample
from liechain.lie import ConstructionError

from conftest import dec_of


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture(scope="module")
def cert_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("certs") / "l411.json"
    assert cli.main(["analyze", "L4.1-1", "--out", str(path), "--budget", "8"]) == 0
    return path


def test_certificate_round_trip_is_bit_exact():
    dec = dec_of("L4.1-3")
    c = search_counterexample(dec, restarts=8)
    cf = certfile.CertificateFile.from_certificate(c, dec, created_at="2026-01-01T00:00:00+00:00")
    text = certfile.dumps(cf)
    back = certfile.loads(text)
    assert back == cf
    assert certfile.dumps(back) == text
    assert back.X_coeffs == tuple(c.x_coeffs.tolist())
    assert list(json.loads(text)) == list(certfile.FIELDS)
    assert "\r" not in text and text.endswith("}\n")


def test_analyze_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert cli.main(["analyze", "L4.1-2", "--out", str(p), "--budget", "8", "--seed", "3"]) == 0
    strip = lambda p: re.sub(r'"created_at": "[^"]*"', "", p.read_text("utf-8"))  # noqa: E731
    assert strip(a) == strip(b)


def test_verify_fresh_certificate(cert_file, capsys):
    code, out, _ = run(capsys, "verify", str(cert_file))
    assert code == 0 and "ACCEPTED" in out


def test_verify_corrupted_certificate(cert_file, tmp_path, capsys):
    d = json.loads(cert_file.read_text())
    d["X_coeffs"][0] += 0.1
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(d))
    code, _, err = run(capsys, "verify", str(bad))
    assert code == 2 and "REJECTED" in err


def test_verify_against_wrong_chain(cert_file, tmp_path, capsys):
    d = json.loads(cert_file.read_text())
    d["chain_id"] = "L4.1-2b-so6"
    bad = tmp_path / "wrong.json"
    bad.write_text(json.dumps(d))
    code, _, err = run(capsys, "verify", str(bad))
    assert code == 2 and "digest mismatch" in err


def test_verify_unreadable(tmp_path, capsys):
    p = tmp_path / "junk.json"
    p.write_text("{not json")
    assert run(capsys, "verify", str(p))[0] == 1
    assert run(capsys, "verify", str(tmp_path / "missing.json"))[0] == 1
    p.write_text('{"schema_version": 1}')
    assert run(capsys, "verify", str(p))[0] == 1


def test_catalog_list(capsys):
    code, out, _ = run(capsys, "catalog", "list")
    assert code == 0
    for i in ("1", "2", "3", "4", "5a", "5b", "6"):
        assert f"L4.1-{i}" in out
    code, out, _ = run(capsys, "catalog", "list", "--format", "json")
    rows = json.loads(out)
    assert code == 0 and {"id", "expected", "reference"} <= set(rows[0])


def test_bad_usage_exits_1(capsys):
    with pytest.raises(SystemExit) as e:
        cli.main(["catalog", "list", "--bogus"])
    assert e.value.code == 1
    with pytest.raises(SystemExit) as e:
        cli.main([])
    assert e.value.code == 1


def test_analyze_outcomes(capsys):
    code, out, _ = run(capsys, "analyze", "SYM-u2-so4-so5")
    assert code == 0 and "SYMMETRIC_PAIR" in out
    code, out, _ = run(capsys, "analyze", "T5.1-n2", "--budget", "100")
    assert code == 3 and "C estimate" in out
    assert run(capsys, "analyze", "nope")[0] == 1


def test_budget_environment_variable(monkeypatch, capsys):
    monkeypatch.setenv(cli.BUDGET_ENV, "8")
    code, out, _ = run(capsys, "analyze", "CONJ-sp-n2")
    assert code == 3 and "within 8 restarts" in out
    monkeypatch.setenv(cli.BUDGET_ENV, "lots")
    with pytest.raises(SystemExit):
        cli.main(["analyze", "CONJ-sp-n2"])


def test_internal_error_exit_code(monkeypatch, capsys):
    def boom(*a, **k):
        raise ConstructionError("synthetic failure")

    monkeypatch.setattr(cli, "classify_chain", boom)
    code, _, err = run(capsys, "analyze", "L4.1-1")
    assert code == 4 and "synthetic failure" in err


def test_report_subset_and_mislabeled_control(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _, _ = run(capsys, "report", "--suite", "paper", "--only", "SYM-u2-so4-so5", "--only", "L4.1-1",
                     "--budget", "8", "--format", "json", "--out", str(out), "--quiet")
    rows = json.loads(out.read_text())
    assert code == 0 and [r["chain_id"] for r in rows] == ["L4.1-1", "SYM-u2-so4-so5"]
    assert all(r["consistent"] for r in rows)
    code, text, _ = run(capsys, "report", "--only", "SYM-u2-so4-so5",
                        "--override-expected", "SYM-u2-so4-so5=FAILS", "--quiet")
    assert code == 2 and "| NO |" in text
    assert run(capsys, "report", "--only", "nope", "--quiet")[0] == 1
    assert run(capsys, "report", "--override-expected", "L4.1-1=MAYBE", "--quiet")[0] == 1
