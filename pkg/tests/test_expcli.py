import csv
import json

import numpy as np
import pytest

from teletomo import teleportsim as ts
from teletomo.expcli import formats, runner
from teletomo.expcli.cli import main
from teletomo.qstate import BELL_OUTCOMES, DensityMatrix, bell_state, random_density

PSI_M = BELL_OUTCOMES[0]


@pytest.fixture
def state3(tmp_path):
    path = tmp_path / "rho3.json"
    assert main(["gen", "--qubits", "3", "--rank", "2", "--seed", "7", "--out", str(path)]) == 0
    return path


def run(*args) -> int:
    return main([str(a) for a in args])


def test_gen_reports_eigenvalues(tmp_path, capsys):
    out = tmp_path / "s.json"
    assert run("gen", "--qubits", 2, "--rank", 1, "--seed", 3, "--out", out) == 0
    info = json.loads(capsys.readouterr().out)
    assert info["max_eigenvalue"] == pytest.approx(1.0)
    rho = formats.read_state(out)
    assert rho.qubits == 2 and np.allclose(rho.mat, random_density(2, 1, 3).mat, atol=1e-15)


def test_gen_invalid_rank_exit_2(tmp_path):
    assert run("gen", "--qubits", 2, "--rank", 5, "--out", tmp_path / "x.json") == 2


def test_exact_pipeline(tmp_path, state3, capsys):
    rec, est = tmp_path / "r.json", tmp_path / "e.json"
    assert run("simulate", state3, "--out", rec) == 0
    assert run("reconstruct", rec, "--out", est) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["method"] == "ClosedForm3" and not report["projected"]
    assert run("verify", state3, est) == 0
    cmp = json.loads(capsys.readouterr().out)
    assert cmp["frobenius"] <= 1e-10
    saved = json.loads(est.read_text())
    assert saved["report"]["raw_trace"] == pytest.approx(1.0)


def test_linear_method_and_outcome_flag(tmp_path, state3, capsys):
    rec, est = tmp_path / "r.json", tmp_path / "e.json"
    assert run("simulate", state3, "--outcome", "PhiPlus,PsiPlus", "--out", rec) == 0
    assert run("reconstruct", rec, "--method", "linear", "--out", est) == 0
    assert json.loads(capsys.readouterr().out)["method"] == "LinearN"
    assert runner.compare(formats.read_state(state3), formats.read_state(est))["frobenius"] <= 1e-10


def test_all_outcomes_then_choose(tmp_path, state3):
    rec, est = tmp_path / "r.json", tmp_path / "e.json"
    assert run("simulate", state3, "--all-outcomes", "--input-set", "minus", "--out", rec) == 0
    rf = formats.read_records(rec)
    assert len(rf.records) == 16 * 16
    assert run("reconstruct", rec, "--outcome", "PhiMinus", "--out", est) == 0
    assert runner.compare(formats.read_state(state3), formats.read_state(est))["frobenius"] <= 1e-10


def test_sampled_pipeline(tmp_path):
    state = tmp_path / "singlet.json"
    singlet = DensityMatrix(2, np.outer(bell_state(PSI_M), bell_state(PSI_M)))
    formats.write_state(state, singlet)
    rec, est = tmp_path / "r.json", tmp_path / "e.json"
    assert run("simulate", state, "--mode", "sampled", "--shots", 20000, "--seed", 4, "--out", rec) == 0
    assert all(r["shots"] == 80000 for r in json.loads(rec.read_text())["records"])
    assert run("reconstruct", rec, "--out", est) == 0
    assert runner.compare(singlet, formats.read_state(est))["trace_distance"] <= 0.05


def test_merge_partial_records(tmp_path, state3):
    rec = tmp_path / "r.json"
    assert run("simulate", state3, "--out", rec) == 0
    obj = json.loads(rec.read_text())
    first, second = dict(obj), dict(obj)
    first["records"], second["records"] = obj["records"][:7], obj["records"][7:]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    formats.write_json(a, first)
    formats.write_json(b, second)
    assert run("reconstruct", a, "--out", tmp_path / "x.json") == 3
    assert run("reconstruct", a, b, "--out", tmp_path / "e.json") == 0


def test_merge_rejects_different_configs(tmp_path, state3):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run("simulate", state3, "--out", a) == 0
    assert run("simulate", state3, "--outcome", "PsiPlus", "--out", b) == 0
    assert run("reconstruct", a, b, "--out", tmp_path / "e.json") == 2


def test_usage_errors_exit_2(tmp_path, state3):
    assert run("simulate", state3, "--mode", "sampled", "--out", tmp_path / "r.json") == 2
    assert run("simulate", state3, "--outcome", "Nope", "--out", tmp_path / "r.json") == 2
    assert run("simulate", tmp_path / "missing.json", "--out", tmp_path / "r.json") == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run("verify", bad, state3) == 2
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2


def test_insufficient_data_exit_3(tmp_path):
    state = tmp_path / "zz.json"
    formats.write_state(state, DensityMatrix(2, np.diag([1.0, 0, 0, 0])))
    rec = tmp_path / "r.json"
    assert run("simulate", state, "--mode", "sampled", "--shots", 20, "--out", rec) == 3


def test_numerical_failure_exit_4(tmp_path):
    # a hand-edited record file whose data cannot be made physical
    state = tmp_path / "s.json"
    formats.write_state(state, random_density(2, 4, seed=0))
    rec = tmp_path / "r.json"
    assert run("simulate", state, "--out", rec) == 0
    obj = json.loads(rec.read_text())
    for r in obj["records"]:
        r["tilde"] = [[-0.1, 0.0], [0.0, 0.0], [0.0, 0.0], [-0.1, 0.0]]
    formats.write_json(rec, obj)
    assert run("reconstruct", rec, "--out", tmp_path / "e.json") == 4


def test_record_file_roundtrip_is_byte_identical(tmp_path, state3):
    rec = tmp_path / "r.json"
    assert run("simulate", state3, "--out", rec) == 0
    again = tmp_path / "r2.json"
    formats.write_records(again, formats.read_records(rec))
    assert again.read_bytes() == rec.read_bytes()


def test_convergence_csv(tmp_path):
    state = tmp_path / "s.json"
    assert run("gen", "--qubits", 2, "--rank", 2, "--seed", 1, "--out", state) == 0
    out = tmp_path / "c.csv"
    assert run("convergence", state, "--shots", "500,5000", "--seeds", "0:3", "--out", out) == 0
    rows = list(csv.DictReader(out.open()))
    assert [(int(r["n_shots"]), int(r["seed"])) for r in rows] == [(n, s) for n in (500, 5000) for s in range(3)]
    assert all(0 <= float(r["trace_distance"]) <= 1 for r in rows)


def test_runner_simulate_checks_qubits():
    cfg = formats.ExperimentConfig(3)
    with pytest.raises(ValueError):
        runner.simulate(random_density(2, 1, 0), cfg)


def test_config_roundtrip():
    cfg = formats.ExperimentConfig(4, mode="sampled", shots_per_probe=10, seed=2**63, designated_outcomes=(PSI_M,) * 3)
    assert formats.ExperimentConfig.from_json(json.loads(json.dumps(cfg.to_json()))) == cfg
    assert ts.all_arrangements(4, cfg.input_set)[0] == (cfg.input_set[0],) * 3
