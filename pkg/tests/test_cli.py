import json

import pytest

from multistage_gt.cli import main
from multistage_gt.io import read_matrix


@pytest.fixture
def matrix_file(tmp_path):
    path = tmp_path / "m.txt"
    assert main(["design", "--t", "64", "--s", "3", "--seed", "5", "--out", str(path)]) == 0
    return path


def test_design_writes_matrix(matrix_file):
    X = read_matrix(matrix_file)
    assert (X.N, X.t, X.k, X.params.seed) == (44, 64, 9, 5)


def test_design_overrides(tmp_path, capsys):
    assert main(["design", "--t", "32", "--s", "2", "--N", "12", "--p", "1/4"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("GTMATRIX v1 N=12 t=32 s=2 k=3 seed=0\n")


def test_decode_one_based(matrix_file, capsys):
    assert main(["decode", "--matrix", str(matrix_file), "--hidden", "3,17,42"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["defectives"] == [3, 17, 42] and out["failure"] is None
    assert len(out["transcript"]["stages"][0]["tests"]) == 44


def test_decode_wrong_size(matrix_file, capsys):
    assert main(["decode", "--matrix", str(matrix_file), "--hidden", "3,17"]) == 2
    assert "expected 3" in capsys.readouterr().err


def test_audit_exit_code(tmp_path, capsys):
    path = tmp_path / "m2.txt"
    main(["design", "--t", "16", "--s", "2", "--out", str(path)])
    code = main(["audit", "--matrix", str(path)])
    summary = json.loads(capsys.readouterr().out.splitlines()[0])
    assert code == (0 if summary["passed"] else 1)
    assert summary["checked_outcomes"] > 0


def test_verify_and_bench(tmp_path, capsys):
    assert main(["verify", "--t", "32", "--s", "2", "--mode", "exhaustive"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("t,s,seed,N,runs,failures") and lines[1].startswith("32,2,0,")
    csv_path = tmp_path / "b.csv"
    assert main(["bench", "--t-list", "64,128", "--s", "3", "--trials", "20", "--csv", str(csv_path)]) == 0
    assert len(csv_path.read_text().splitlines()) == 3


def test_verify_baseline(capsys):
    assert main(["verify", "--t", "16", "--s", "3", "--mode", "exhaustive", "--decoder", "baseline"]) == 0
    row = capsys.readouterr().out.splitlines()[1].split(",")
    assert row[4] == "560" and row[5] == "0"


def test_rates(capsys):
    assert main(["rates"]) == 0
    obj = json.loads(capsys.readouterr().out)
    assert obj["c3"] == pytest.approx(1.3555, abs=1e-3)


def test_bad_input_reports_error(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("GTMATRIX v1 N=2 t=3 s=2 k=1 seed=0\n101\n011\n")
    assert main(["audit", "--matrix", str(bad)]) == 2
    assert "weight" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["design", "--t", "64"])
