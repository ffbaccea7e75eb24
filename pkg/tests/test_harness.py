import json
import math

import numpy as np
import pytest

from torusleray import harness
from torusleray.cli import main
from torusleray.errors import DomainError, EmptyEnsembleError


def small_config(**kw):
    base = dict(dim=2, energy=5, samples=30, seed=11)
    base.update(kw)
    return harness.ExperimentConfig(**base)


def test_reports_are_byte_identical():
    a = harness.run_expectation_experiment(small_config())
    b = harness.run_expectation_experiment(small_config())
    assert a.to_json(include_timing=False) == b.to_json(include_timing=False)


def test_report_fields():
    rep = harness.run_expectation_experiment(small_config(keep_trials=True))
    assert rep.multiplicity == 8
    assert math.isfinite(rep.mean)
    assert rep.standard_error > 0
    assert rep.predicted_mean == pytest.approx(1 / math.sqrt(2 * math.pi))
    assert len(rep.trials) == 30
    assert rep.mean == pytest.approx(float(np.mean(rep.trials)), abs=1e-15)


def test_single_sample_has_no_standard_error():
    rep = harness.run_expectation_experiment(small_config(samples=1))
    assert rep.standard_error is None
    d = rep.to_json_dict()
    assert d["standard_error"] is None


def test_variance_experiment_adds_quadrature():
    rep = harness.run_variance_experiment(small_config(samples=40))
    assert rep.quadrature_second_moment > 1 / (2 * math.pi)
    assert rep.predicted_variance == pytest.approx(
        rep.quadrature_second_moment - 1 / (2 * math.pi)
    )


def test_variance_of_constant_stub_is_zero(monkeypatch):
    monkeypatch.setattr(harness, "_estimate_one", lambda *a, **k: 0.25)
    rep = harness.run_expectation_experiment(small_config())
    assert rep.mean == 0.25
    assert rep.sample_variance == 0.0


def test_epsilon_method_resolves_defaults():
    rep = harness.run_expectation_experiment(
        small_config(samples=3, method=harness.EPSILON, grid=4096)
    )
    assert rep.config.epsilon == 1e-3
    assert rep.config.method == harness.EPSILON


def test_rejects_bad_configs():
    with pytest.raises(DomainError):
        harness.run_expectation_experiment(small_config(samples=0))
    with pytest.raises(EmptyEnsembleError):
        harness.run_expectation_experiment(small_config(energy=3))
    with pytest.raises(DomainError):
        harness.run_expectation_experiment(small_config(method="bogus"))
    with pytest.raises(DomainError):
        harness.run_expectation_experiment(
            small_config(dim=3, energy=2, method=harness.SURFACE)
        )


def test_thread_count_does_not_change_results():
    a = harness.run_expectation_experiment(small_config(threads=1))
    b = harness.run_expectation_experiment(small_config(threads=4))
    assert a.mean == b.mean
    assert a.sample_variance == b.sample_variance


def test_csv_rows():
    rep = harness.run_expectation_experiment(small_config(samples=5, keep_trials=True))
    rows = rep.csv_rows()
    assert rows[0] == "trial,leray,method,epsilon,grid"
    assert len(rows) == 7
    assert rows[-1].startswith("summary,")


def test_cli_lattice(capsys):
    assert main(["lattice", "--dim", "2", "--energy", "325"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["multiplicity"] == 24


def test_cli_moments_degenerate(capsys):
    code = main(["moments", "--dim", "2", "--energy", "1"])
    assert code == 1
    assert "degenerate frequency set" in capsys.readouterr().err


def test_cli_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["lattice", "--bogus"])
    assert exc.value.code == 2


def test_cli_leray_and_sample(capsys):
    assert main(["sample", "--dim", "2", "--energy", "5", "--seed", "3"]) == 0
    capsys.readouterr()
    assert main(
        ["leray", "--dim", "2", "--energy", "5", "--seed", "3", "--grid", "256"]
    ) == 0
    out = json.loads(capsys.readouterr().out)
    assert 0.1 < out["value"] < 1.0


def test_cli_experiment_writes_file(tmp_path):
    path = tmp_path / "report.json"
    code = main(
        [
            "experiment",
            "--dim",
            "2",
            "--energy",
            "5",
            "--samples",
            "10",
            "--seed",
            "7",
            "--output",
            str(path),
        ]
    )
    assert code == 0
    payload = json.loads(path.read_text())
    assert payload["config"]["samples"] == 10
    assert math.isfinite(payload["mean"])


def test_cli_singular(capsys):
    assert main(["singular", "--dim", "2", "--energy", "5", "--cubes", "64"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["M"] == 64
    assert out["measB"] <= 1.0
