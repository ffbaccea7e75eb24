import math

import numpy as np
import pytest

from torusleray import ensemble, leray
from torusleray.errors import DomainError, HypothesisError, ResolutionError
from torusleray.lattice import enumerate_frequencies


def sine_field():
    """f = sin 2pi x1, whose nodal measure is exactly 1/pi."""
    freqs = enumerate_frequencies(2, 1)
    coeffs = np.zeros((len(freqs.representatives), 2))
    for i, lam in enumerate(freqs.representatives):
        if lam == (1, 0):
            coeffs[i, 1] = -1.0
    return ensemble.explicit_field(freqs, coeffs, 1.0)


def test_surface_exact_for_single_sine():
    est = leray.leray_surface_2d(sine_field(), 512)
    assert est.value == pytest.approx(1.0 / math.pi, abs=1e-10)
    assert est.method == "surface_integral"


def test_epsilon_estimator_for_single_sine():
    # band measure of |sin 2pi x| < eps is (2/pi) asin(eps); estimator
    # converges to 1/pi as eps -> 0 with the grid resolving the band
    f = sine_field()
    est = leray.leray_epsilon(f, 0.05, 32768)
    assert est.value == pytest.approx(1.0 / math.pi, abs=1e-3)
    assert est.epsilon == 0.05


def test_epsilon_rejects_bad_inputs(freqs_e25):
    f = ensemble.sample(freqs_e25, seed=0)
    with pytest.raises(DomainError):
        leray.leray_epsilon(f, 0.0)
    with pytest.raises(ResolutionError):
        leray.leray_epsilon(f, 0.01, grid=8)


def test_surface_requires_dim_2(freqs_d3_e2):
    f = ensemble.sample(freqs_d3_e2, seed=0)
    with pytest.raises(DomainError):
        leray.leray_surface_2d(f, 64)


def test_surface_zero_for_uniform_sign():
    c = ensemble.ConstantField(0.5, dim=2)
    assert leray.leray_surface_2d(c, 64).value == 0.0


def test_surface_grid_convergence(freqs_e25):
    f = ensemble.sample(freqs_e25, seed=11)
    coarse = leray.leray_surface_2d(f, 256).value
    fine = leray.leray_surface_2d(f, 1024).value
    assert coarse == pytest.approx(fine, abs=2e-3)


def test_epsilon_estimate_positive_and_finite(freqs_e25):
    f = ensemble.sample(freqs_e25, seed=12)
    est = leray.leray_epsilon(f, 0.05, 1024)
    assert 0.0 < est.value < 10.0
    assert est.error_hint > 0


def test_estimators_agree_at_moderate_epsilon(freqs_e25):
    for trial in range(5):
        f = ensemble.sample(freqs_e25, seed=13, trial=trial)
        s = leray.leray_surface_2d(f, 1024).value
        e = leray.leray_epsilon(f, 0.01, 8192).value
        assert abs(s - e) < 5e-3


def test_epsilon_convergence_schedule(freqs_e25):
    f = ensemble.sample(freqs_e25, seed=14)
    out = leray.epsilon_convergence(f, [0.2, 0.1, 0.05], grid=2048)
    assert len(out["values"]) == 3
    assert out["convergence_estimate"] < 0.05
    with pytest.raises(DomainError):
        leray.epsilon_convergence(f, [0.1, 0.2])


def test_estimate_serialization(freqs_e25):
    f = ensemble.sample(freqs_e25, seed=15)
    est = leray.leray_surface_2d(f, 256)
    d = est.to_json_dict()
    assert d["method"] == "surface_integral"
    assert est.csv_row().startswith("surface_integral,")


def test_kac_bound_single_sine():
    # g = sin 2pi t: degree 1; |g| < 1/2 forces |g'| > pi sqrt(3)
    beta = math.pi * math.sqrt(3.0)
    out = leray.kac_bound([0.0], [1.0], alpha=0.5, beta=beta)
    assert out["degree"] == 1
    assert out["bound"] == pytest.approx(2.0 / beta)
    assert out["empirical_sup"] <= out["bound"]
    # sup of the level estimates approaches 1/pi from below
    assert out["empirical_sup"] == pytest.approx(1.0 / math.pi, abs=0.02)


def test_kac_bound_rejects_false_hypothesis():
    # alpha = 1 admits critical points inside the band
    with pytest.raises(HypothesisError):
        leray.kac_bound([0.0], [1.0], alpha=1.0, beta=1.0)


def test_kac_bound_degree_detection():
    out = leray.kac_bound([0.0, 0.0, 1.0], [0.0, 0.0, 0.0], alpha=0.5, beta=1.0)
    assert out["degree"] == 3


def test_ensemble_bound_dominates(freqs_e25):
    f = ensemble.sample(freqs_e25, seed=16)
    n = 1024
    vals = np.asarray(f.evaluate_grid(n))
    idx = np.argwhere(np.abs(vals) <= 0.2)
    grads = f.gradient(idx / n)
    beta = 0.9 * float(np.min(np.hypot(grads[:, 0], grads[:, 1])))
    out = leray.ensemble_bound(f, alpha=0.2, beta=beta, grid=n)
    assert out["dominates"]
    assert out["bound"] >= max(v for _, v in out["estimates"])


def test_ensemble_bound_rejects_false_hypothesis(freqs_e25):
    f = ensemble.sample(freqs_e25, seed=16)
    with pytest.raises(HypothesisError):
        leray.ensemble_bound(f, alpha=0.2, beta=1e6, grid=512)


def test_default_grid_scales_with_energy(freqs_e25, freqs_e325):
    f1 = ensemble.sample(freqs_e25, seed=17)
    f2 = ensemble.sample(freqs_e325, seed=17)
    assert leray.default_grid(f2) >= leray.default_grid(f1)
