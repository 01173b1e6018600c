import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from aqec.cli import code_from_dict, code_to_dict, load_code, main
from aqec.codes import binomial_code, fidelity, thirteen_code
from aqec.models import uniform_decay
from aqec.optimizer import ConvergenceLog


def run(tmp_path, *args):
    return main([*args, "--out", str(tmp_path)])


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.mark.parametrize("args, expected, tol", [
    (["--model", "uniform", "--n", "4", "--code", "thirteen", "--gamma-ratio", "1e6"], 0.9999985, 1e-7),
    (["--model", "photon_loss", "--n", "5", "--code", "binomial"], 0.999994, 1e-6),
    (["--model", "power_law", "--alpha", "0.4", "--n", "5", "--code", "binomial"], 0.988, 2e-3),
])
def test_evaluate_reference_values(tmp_path, args, expected, tol):
    assert run(tmp_path, "evaluate", *args) == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert abs(report["fidelity"] - expected) < tol
    assert report["infidelity"] == 1 - report["fidelity"]
    assert report["kappa"] is not None and report["tau"] == 1.0
    assert report["model"]["params"]["n"] in (4, 5)


def test_evaluate_dimension_implied_by_code(tmp_path):
    assert run(tmp_path, "evaluate", "--model", "uniform", "--code", "thirteen") == 0


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"model": "uniform", "n": 4, "code": "thirteen", "gamma-ratio": 1e3}))
    assert run(tmp_path, "evaluate", "--config", str(cfg)) == 0
    f1 = json.loads((tmp_path / "report.json").read_text())["fidelity"]
    assert abs(f1 - fidelity(uniform_decay(4), thirteen_code(1e3))) < 1e-15
    assert run(tmp_path, "evaluate", "--config", str(cfg), "--gamma-ratio", "1e6") == 0
    f2 = json.loads((tmp_path / "report.json").read_text())["fidelity"]
    assert abs(f2 - 0.9999985) < 1e-7


@pytest.mark.parametrize("args", [
    ["evaluate", "--model", "uniform", "--n", "4", "--code", "binomial"],   # dimension mismatch
    ["evaluate", "--model", "nonsense", "--n", "4", "--code", "thirteen"],
    ["evaluate", "--code", "thirteen"],                                     # no model
    ["evaluate", "--model", "uniform", "--code", "missing.json", "--n", "4"],
    ["optimize", "--model", "uniform", "--n", "4", "--max-iter", "20000"],  # needs --long-running
    ["frobnicate"],
    ["evaluate", "--n", "four"],
    ["evaluate", "--freeze", "x"],
    ["sweep", "--n", "4", "--code", "thirteen"],                            # no values
])
def test_usage_errors_exit_one(tmp_path, args):
    assert run(tmp_path, *args) == 1


def test_bad_config_exits_one(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"colour": "blue"}))
    assert run(tmp_path, "evaluate", "--config", str(cfg)) == 1
    cfg.write_text("{not json")
    assert run(tmp_path, "evaluate", "--config", str(cfg)) == 1


def test_numerical_failure_exits_two(tmp_path, monkeypatch):
    import aqec.cli as cli
    monkeypatch.setattr(cli, "fidelity", lambda *a, **k: float("nan"))
    assert run(tmp_path, "evaluate", "--model", "uniform", "--code", "thirteen") == 2


def test_code_artifact_roundtrip():
    code = binomial_code(1e6)
    d = json.loads(json.dumps(code_to_dict(code, {"seed": 3})))
    assert d["dim"] == 5 and d["metadata"]["seed"] == 3
    assert np.array(d["induced_jumps"][0]["re"]).shape == (5, 5)
    back = code_from_dict(d)
    for a, b in zip([code.word0, code.word1, code.control, *code.induced_jumps],
                    [back.word0, back.word1, back.control, *back.induced_jumps]):
        assert np.array_equal(a, b)


def test_optimize_artifact_reevaluates(tmp_path):
    args = ["--model", "uniform", "--n", "4", "--max-iter", "15", "--seed", "3"]
    assert run(tmp_path, "optimize", *args) == 0
    art = json.loads((tmp_path / "code.json").read_text())
    meta = art["metadata"]
    assert meta["seed"] == 3 and meta["tau"] == 1.0 and meta["model"]["name"] == "uniform"
    log = ConvergenceLog.read_csv(tmp_path / "log.csv")
    assert len(log.records) == 15 == meta["iterations"]
    assert log.final_fidelity == meta["fidelity"]
    code, _ = load_code(tmp_path / "code.json")
    assert abs(fidelity(uniform_decay(4), code) - meta["fidelity"]) <= 1e-12
    out = tmp_path / "re"
    assert main(["evaluate", *args[:4], "--code", str(tmp_path / "code.json"), "--out", str(out)]) == 0
    assert abs(json.loads((out / "report.json").read_text())["fidelity"] - meta["fidelity"]) <= 1e-12


def test_optimize_basis_only_converges_quickly(tmp_path):
    assert run(tmp_path, "optimize", "--model", "uniform", "--n", "4", "--code", "thirteen",
               "--randomize", "basis", "--freeze", "b", "o", "--max-iter", "10") == 0
    rows = read_csv(tmp_path / "log.csv")
    assert abs(float(rows[-1]["infidelity"]) - 1.5e-6) < 1e-8
    # leakage out of {|1>, |3>} is tracked against the reference words
    assert float(rows[-1]["leakage_code_space"]) < 1e-4
    assert all(float(r["o_step"]) == 0 for r in rows)


def test_stagnant_run_log_length(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"optimizer": {"stagnation_window": 4}}))
    assert run(tmp_path, "optimize", "--config", str(cfg), "--model", "uniform", "--code",
               "thirteen", "--freeze", "b", "o", "--max-iter", "100") == 0
    meta = json.loads((tmp_path / "code.json").read_text())["metadata"]
    assert meta["termination"] == "stagnation"
    assert len(read_csv(tmp_path / "log.csv")) == meta["iterations"] == 4


def test_sweep_evaluate_endpoints(tmp_path):
    assert run(tmp_path, "sweep", "--n", "4", "--code", "thirteen", "--values", "0", "0.5") == 0
    rows = read_csv(tmp_path / "sweep.csv")
    assert list(rows[0]) == ["alpha", "fidelity", "infidelity", "kappa", "source", "error"]
    assert abs(float(rows[0]["fidelity"]) - 0.9999985) < 1e-7
    assert abs(float(rows[1]["fidelity"]) - 0.88) < 0.01
    assert all(r["source"] == "reference" for r in rows)
    first = (tmp_path / "sweep.csv").read_text()
    assert run(tmp_path, "sweep", "--n", "4", "--code", "thirteen", "--values", "0", "0.5") == 0
    assert (tmp_path / "sweep.csv").read_text() == first


def test_sweep_records_failures_and_continues(tmp_path):
    assert run(tmp_path, "sweep", "--n", "4", "--code", "thirteen", "--values", "0", "nan", "0.5") == 0
    rows = read_csv(tmp_path / "sweep.csv")
    assert [r["source"] for r in rows] == ["reference", "failed", "reference"]
    assert rows[1]["error"]


def test_sweep_optimize_mode(tmp_path):
    assert run(tmp_path, "sweep", "--n", "3", "--values", "0.2", "--optimize", "--seeds", "2",
               "--max-iter", "3") == 0
    (row,) = read_csv(tmp_path / "sweep.csv")
    assert row["source"] == "random-best"
    assert (tmp_path / "code_alpha0.2.json").exists()


def test_seeds_ranking(tmp_path):
    args = ["seeds", "--model", "uniform", "--n", "4", "--seeds", "3", "--max-iter", "5", "--seed", "10"]
    assert run(tmp_path, *args) == 0
    rows = read_csv(tmp_path / "ranking.csv")
    fids = [float(r["fidelity"]) for r in rows]
    assert fids == sorted(fids, reverse=True)
    assert sorted(int(r["seed"]) for r in rows) == [10, 11, 12]
    for r in rows:
        code, meta = load_code(tmp_path / r["artifact"])
        assert meta["seed"] == int(r["seed"])
        assert abs(fidelity(uniform_decay(4), code) - float(r["fidelity"])) <= 1e-12
    first = (tmp_path / "ranking.csv").read_text()
    again = tmp_path / "again"
    assert main([*args, "--out", str(again)]) == 0
    assert (again / "ranking.csv").read_text() == first


def test_seeds_from_reference_code(tmp_path):
    assert run(tmp_path, "seeds", "--model", "photon_loss", "--code", "binomial", "--randomize", "basis",
               "--freeze", "b", "o", "--seeds", "2", "--max-iter", "2") == 0
    assert len(read_csv(tmp_path / "ranking.csv")) == 2
    assert run(tmp_path, "seeds", "--model", "photon_loss", "--code", "binomial", "--seeds", "2") == 1


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "aqec", "evaluate", "--model", "photon_loss", "--code",
                           "binomial", "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "F = 0.99999" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "aqec", "evaluate", "--bogus"], capture_output=True)
    assert proc.returncode == 1
