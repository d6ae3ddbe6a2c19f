"""CLI surface: subcommands, exit codes, report files."""

import json

import pytest

from fqlab.cli import main


def test_gauss_cli(capsys):
    assert main(["gauss", "--q", "3", "--chi", "1"]) == 0
    out = capsys.readouterr().out
    assert "g(chi_1, psi)" in out and "float" in out


def test_kloosterman_cli(capsys):
    assert main(["kloosterman", "--q", "3", "--a", "1"]) == 0
    out = capsys.readouterr().out
    assert "Kl(1)" in out


def test_bessel_cli(capsys):
    assert main(["bessel", "--n", "2", "--q", "3",
                 "--weights", "1,0;0,1"]) == 0
    out = capsys.readouterr().out
    assert "phi(0, 0)" in out


def test_central_check_cli(capsys, tmp_path):
    out = tmp_path / "cells.json"
    code = main(["central-check", "--n", "2", "--q", "3",
                 "--weights", "standard", "--mode", "wchiprime",
                 "--out", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["passed"] is True


def test_lemmas_cli(capsys):
    assert main(["lemmas", "--n", "2", "--q", "3"]) == 0
    assert "PASS" in capsys.readouterr().out


def test_induce_cli_at(capsys):
    assert main(["induce", "--n", "2", "--q", "3", "--weights", "standard",
                 "--at", "0,1;1,0"]) == 0
    out = capsys.readouterr().out
    assert "Phi(g) = 1" in out  # psi(tr) = psi(0) = 1


def test_induce_cli_table(capsys, tmp_path):
    out = tmp_path / "table.csv"
    assert main(["induce", "--n", "2", "--q", "3", "--weights", "standard",
                 "--table", "--out", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "class,exact,float,size"
    assert len(lines) > 5


def test_verify_cli_pass(capsys, tmp_path):
    out = tmp_path / "rep.json"
    csv_out = tmp_path / "rep.csv"
    code = main(["verify", "--n", "2", "--q", "3", "--weights", "standard",
                 "--out", str(out), "--csv", str(csv_out)])
    assert code == 0
    assert json.loads(out.read_text())["failures"] == 0
    assert csv_out.exists()


def test_verify_cli_orbit_and_weights_file(tmp_path, capsys):
    wfile = tmp_path / "weights.txt"
    wfile.write_text("1,0\n0,1\n")
    assert main(["verify", "--n", "2", "--q", "3",
                 "--weights", str(wfile)]) == 0
    assert main(["verify", "--n", "2", "--q", "5", "--orbit", "0,1"]) == 0


def test_verify_cli_mirabolic(capsys):
    assert main(["verify", "--n", "2", "--q", "3", "--mirabolic"]) == 0


def test_suite_cli(capsys, tmp_path):
    cfg = tmp_path / "suite.json"
    cfg.write_text(json.dumps({"checks": [
        {"check": "artin_schreier", "qs": [3]},
        {"check": "vanishing", "n": 2, "q": 3, "rho": "standard"},
    ]}))
    assert main(["suite", "--config", str(cfg), "--out", str(tmp_path / "r")]) == 0
    out = capsys.readouterr().out
    assert "[PASS] artin_schreier" in out
    assert (tmp_path / "r" / "summary.json").exists()


def test_suite_cli_unknown_check(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"checks": [{"check": "bogus"}]}))
    assert main(["suite", "--config", str(cfg)]) == 2


def test_version_flag():
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
