import csv
import json

import pytest

from perturbed_airy import CertificationFailure, cli


def test_table_csv(tmp_path):
    code = cli.main(["table", "--lambda", "0.5", "--t", "1", "--nmax", "20", "--digits", "60", "--out", str(tmp_path), "--format", "csv"])
    assert code == 0
    rows = list(csv.DictReader((tmp_path / "recurrence.csv").open()))
    assert len(rows) == 21
    moments = json.loads((tmp_path / "moments.json").read_text())
    assert len(moments["mu"]) == 42 and moments["lambda"] == "0.5"


def test_table_is_deterministic(tmp_path):
    argv = ["table", "--nmax", "6", "--digits", "30", "--format", "json"]
    assert cli.main(argv + ["--out", str(tmp_path / "a")]) == 0
    assert cli.main(argv + ["--out", str(tmp_path / "b")]) == 0
    for name in ["moments.json", "recurrence.json"]:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    body = json.loads((tmp_path / "a" / "recurrence.json").read_text())
    assert body["config"]["nmax"] == 6 and len(body["moments_sha256"]) == 64


@pytest.mark.parametrize(
    "argv",
    [
        ["table", "--lambda", "-1"],
        ["table", "--nmax", "20", "--jmax", "30"],
        ["table", "--digits", "20"],
        ["table", "--t", "-1"],
        ["evolve", "--t", "0", "--n", "3"],
        ["evolve", "--n", "1"],
        ["verify", "--n-range", "5:2"],
    ],
)
def test_parse_time_rejections(argv, capsys):
    with pytest.raises(SystemExit) as info:
        cli.parse_config(argv)
    assert info.value.code == 2
    assert "error" in capsys.readouterr().err


def test_verify_pass_and_report(tmp_path):
    assert cli.main(["verify", "--nmax", "14", "--out", str(tmp_path)]) == 0
    body = json.loads((tmp_path / "verify.json").read_text())
    meta = body["meta"]
    assert meta["passed"] is True
    assert meta["config"]["lambda"] == "0.5"
    assert len(meta["moments_sha256"]) == 64
    names = {name for rec in body["records"] for name in rec["residuals"]}
    assert {"lowering", "raising", "S1", "S2'", "re1", "re4", "h1", "h2", "ode"} <= names


def test_verify_fuzz_fails(tmp_path, capsys):
    code = cli.main(["verify", "--nmax", "10", "--fuzz", "1e-15", "--out", str(tmp_path)])
    assert code == cli.EXIT_VERIFY == 4
    err = capsys.readouterr().err
    assert "verify failed" in err
    meta = json.loads((tmp_path / "verify.json").read_text())["meta"]
    assert meta["passed"] is False and meta["worst"]["identity"] in err


def test_verify_n_range(tmp_path):
    assert cli.main(["verify", "--nmax", "14", "--n-range", "2:12", "--format", "csv", "--out", str(tmp_path)]) == 0
    rows = list(csv.DictReader((tmp_path / "verify.csv").open()))
    assert {int(r["n"]) for r in rows} == set(range(2, 13))
    assert json.loads((tmp_path / "verify.meta.json").read_text())["config"]["n_range"] == "2:12"


def test_evolve(tmp_path):
    assert cli.main(["evolve", "--n", "3", "--t", "1", "--digits", "40", "--out", str(tmp_path)]) == 0
    body = json.loads((tmp_path / "evolve.json").read_text())
    assert body["meta"]["passed"] is True
    assert set(body["meta"]["hankel_H"]["3"]) == {"fd", "formula", "residual", "star_sum", "budget"}


def test_asympt_at_t0(tmp_path):
    assert cli.main(["asympt", "--nmax", "24", "--t", "0", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "asympt.csv").read_text().splitlines()
    assert lines[0] == "n,alpha_ratio,beta_ratio" and len(lines) == 25
    data = json.loads((tmp_path / "asympt.json").read_text())
    assert data["fit_n"] == [3, 6, 12, 24]


def test_certification_failure_exit(tmp_path, monkeypatch, capsys):
    def broken(*args, **kwargs):
        raise CertificationFailure("Pearson recursion fails at j=3", j=3, residual=1)

    monkeypatch.setattr(cli, "moment_table", broken)
    assert cli.main(["table", "--nmax", "4", "--out", str(tmp_path)]) == 2
    assert "j=3" in capsys.readouterr().err


def test_precision_exhausted_exit(tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(cli, "recurrence_guard", lambda nmax: 10)
    assert cli.main(["table", "--nmax", "20", "--digits", "30", "--out", str(tmp_path)]) == 3
    assert "precision exhausted" in capsys.readouterr().err
