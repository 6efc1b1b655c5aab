import csv
import json

import pytest

from driftcert.cli import HORIZON_ENV, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_classify_sit_still(capsys):
    code, out, _ = run(capsys, "classify", "--builtin", "sit_still", "--params", "k=1", "--horizon", "10000")
    assert code == 0
    assert json.loads(out)["conclusion"]["class"] == "NullRecurrent"


def test_classify_powerlaw(capsys):
    code, out, _ = run(
        capsys, "classify", "--builtin", "powerlaw_transient", "--params", "alpha=0.75", "--horizon", "1000000"
    )
    report = json.loads(out)
    assert code == 0
    assert report["conclusion"]["class"] == "Transient"
    assert report["conclusion"]["criterion"] == "powerlaw_family"


def test_drifts_csv(capsys, tmp_path):
    path = tmp_path / "out.csv"
    code, _, _ = run(
        capsys, "drifts", "--builtin", "lopsided", "--params", "m=1,n=2", "--range", "1:100", "--csv", str(path)
    )
    assert code == 0
    rows = list(csv.DictReader(path.open()))
    assert len(rows) == 100 and all(float(r["gamma"]) == 0.0 for r in rows)


def test_drifts_stdout(capsys):
    code, out, _ = run(capsys, "drifts", "--builtin", "sit_still", "--params", "k=2", "--range", "0:3")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("i,gamma,sigma") and len(lines) == 5


def test_spec_file(capsys, tmp_path):
    path = tmp_path / "walk.yaml"
    path.write_text(
        "name: walk\n"
        "banded_rule:\n  cutoff: 1\n  offsets: {-1: '1/2', 1: '1/2'}\n"
        "boundary_rows:\n  0: {0: '1/2', 1: '1/2'}\n"
        "down_bound: 1\nup_bound: 1\n"
    )
    code, out, _ = run(capsys, "classify", str(path), "--horizon", "2000")
    assert code == 0
    report = json.loads(out)
    assert report["spec"]["name"] == "walk"
    assert report["conclusion"]["class"] == "NullRecurrent"


def test_out_file_and_simulation(capsys, tmp_path):
    path = tmp_path / "report.json"
    code, out, _ = run(
        capsys, "classify", "--builtin", "lopsided", "--params", "m=1,n=1", "--horizon", "1000",
        "--simulate", "50,1000,7", "--workers", "2", "--out", str(path),
    )
    assert code == 0 and out == ""
    sim = json.loads(path.read_text())["simulation"]
    assert sim["n_trajectories"] == 50 and sim["master_seed"] == 7


def test_bd_oracle_exit_codes(capsys, tmp_path):
    code, out, _ = run(capsys, "bd-oracle", "--p-expr", "1/2 + 1/(2*(i+1))", "--horizon", "10000")
    assert code == 0 and json.loads(out)["class"] == "Transient"
    code, _, _ = run(capsys, "bd-oracle", "--p-expr", "1/2 + 1/(4*(i+1))", "--horizon", "10000")
    assert code == 2
    csv_path = tmp_path / "rho.csv"
    code, out, _ = run(
        capsys, "bd-oracle", "--p-expr", "1/2 + 1/(4*(i+1))", "--horizon", "10000",
        "--tail", "power:1", "--csv", str(csv_path),
    )
    assert code == 0 and json.loads(out)["class"] == "Recurrent"
    assert csv_path.read_text().startswith("i,rho_i,partial_sum")


def test_inconclusive_exit_code(capsys):
    code, out, _ = run(capsys, "classify", "--builtin", "ergodic_drift", "--horizon", "50", "--theta", "0.9")
    report = json.loads(out)
    assert (code == 2) == (report["conclusion"]["class"] == "Inconclusive")


@pytest.mark.parametrize(
    "argv",
    [
        ["classify", "--builtin", "nope"],
        ["classify", "--builtin", "sit_still", "--params", "k=0"],
        ["classify"],
        ["classify", "--bogus"],
        ["drifts", "--builtin", "sit_still", "--params", "k=1", "--range", "5"],
        ["bd-oracle", "--p-expr", "1/2", "--tail", "cubic:2"],
        ["nosuchcommand"],
    ],
)
def test_errors_exit_one(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1 and err


def test_bad_spec_file(capsys, tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("banded_rule: [1, 2\n")
    code, _, err = run(capsys, "classify", str(path))
    assert code == 1 and "SpecParseError" in err


def test_env_horizon(capsys, monkeypatch):
    monkeypatch.setenv(HORIZON_ENV, "2000")
    _, out, _ = run(capsys, "classify", "--builtin", "sit_still", "--params", "k=1")
    report = json.loads(out)
    assert report["verdicts"][1]["witnesses"]["H"] == 2000


def test_examples_lists_six(capsys):
    code, out, _ = run(capsys, "examples")
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 6
    assert {ln.split("\t")[0] for ln in lines} == {
        "ergodic_drift", "sit_still", "lopsided", "ergodic_zero_drift", "birth_death", "powerlaw_transient",
    }


def test_cli_deterministic(capsys):
    argv = ["classify", "--builtin", "lopsided", "--params", "m=1,n=1", "--horizon", "1000", "--simulate", "40,500,3"]
    assert run(capsys, *argv) == run(capsys, *argv)


def test_tail_option(capsys):
    base = ["classify", "--builtin", "powerlaw_transient", "--params", "alpha=0.75", "--horizon", "1000"]
    code, out, _ = run(capsys, *base, "--tail", "1/36,3/4,0,2")
    assert code == 0 and json.loads(out)["conclusion"]["class"] == "Transient"
    # default cutoff 1 would cover boundary row 1, which does not follow the power law
    code, _, err = run(capsys, *base, "--tail", "1/36,3/4")
    assert code == 1 and "TailInconsistent" in err
    code, _, err = run(capsys, *base, "--tail", "1/36,3/4,0,two")
    assert code == 1 and "cutoff" in err
