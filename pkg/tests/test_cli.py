import json

import numpy as np
import pytest

from moment_wasserstein.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_w1(tmp_path, capsys):
    (tmp_path / "a.csv").write_text("0\n2\n")
    (tmp_path / "b.csv").write_text("1,0.5\n3,0.5\n")
    code, out, _ = run(capsys, "w1", "--a", str(tmp_path / "a.csv"), "--b", str(tmp_path / "b.csv"))
    assert code == 0 and float(out) == 1.0


def test_w1_bad_file(tmp_path, capsys):
    (tmp_path / "a.csv").write_text("0,1,2\n")
    code, _, err = run(capsys, "w1", "--a", str(tmp_path / "a.csv"), "--b", str(tmp_path / "a.csv"))
    assert code == 1 and "error" in err


def test_sliced(tmp_path, capsys):
    (tmp_path / "a.csv").write_text("0,0\n")
    (tmp_path / "b.csv").write_text("1,0\n")
    code, out, _ = run(capsys, "sliced", "--a", str(tmp_path / "a.csv"), "--b", str(tmp_path / "b.csv"), "--epsilon", "0.1")
    res = json.loads(out)
    assert code == 0 and res["net_size"] == 63 and res["net_sup"] == pytest.approx(1.0)


def test_approx(capsys):
    code, out, _ = run(capsys, "approx", "--function", "abs", "--B", "3", "--m", "16", "--json")
    res = json.loads(out)
    assert code == 0 and res["measured_sup_error"] <= res["sup_error_bound"] == 3.375
    assert all(mg >= 0 for mg in res["coeff_margins"])
    code, out, _ = run(capsys, "approx", "--function", "sin", "--B", "3", "--m", "8")
    assert code == 0 and "18B/m" in out
    assert run(capsys, "approx", "--function", "cos", "--B", "3", "--m", "8")[0] == 1
    assert run(capsys, "approx", "--function", "abs", "--B", "3", "--m", "6")[0] == 1


def test_orlicz(tmp_path, capsys):
    (tmp_path / "x.csv").write_text("1\n-1\n")
    code, out, _ = run(capsys, "orlicz", "--input", str(tmp_path / "x.csv"), "--r", "4", "--verify-moments")
    res = json.loads(out)
    assert res["K"] == pytest.approx(1 / np.sqrt(np.sqrt(3) - 1), abs=1e-8)
    assert set(res["moment_ratios"]) == {"2", "4"}
    code, out, _ = run(capsys, "orlicz", "--input", "ar1:rho=0.5", "--r", "6", "--n", "500", "--verify-tails")
    assert code == 0 and "fitted_c" in json.loads(out)
    code, out, _ = run(capsys, "orlicz", "--input", "student_t:dof=3", "--r", "4", "--n", "500")
    assert code == 0 and json.loads(out)["sample_size"] == 500


def test_experiment_and_certify(tmp_path, capsys):
    cfg = {"generator": "shock", "n_schedule": [50, 200], "replicates": 20, "seed": 1,
           "output": str(tmp_path / "r")}
    (tmp_path / "c.json").write_text(json.dumps(cfg))
    code, _, err = run(capsys, "experiment", "--config", str(tmp_path / "c.json"))
    assert code == 2 and json.loads(err)["hypothesis_b"] is False
    assert (tmp_path / "r.csv").exists() and (tmp_path / "r.json").exists()
    cfg.pop("output")
    cfg["generator"] = "gaussian"
    (tmp_path / "c.json").write_text(json.dumps(cfg))
    code, out, _ = run(capsys, "certify", "--config", str(tmp_path / "c.json"))
    assert code == 0 and out.startswith("# n:")


def test_bad_config(tmp_path, capsys):
    (tmp_path / "c.json").write_text(json.dumps({"generator": "gaussian", "n_schedule": []}))
    assert run(capsys, "experiment", "--config", str(tmp_path / "c.json"))[0] == 1
    assert run(capsys, "experiment", "--config", str(tmp_path / "missing.json"))[0] == 1
