"""Acceptance suite: ten end-to-end criteria at fixed tolerances.

Each test emits one PASS line with its measured numbers (visible with
pytest -s; pytest -v adds its own per-test verdict line).  The Monte
Carlo criteria share one 20000-trial run per energy through the
module-scoped `mc_runs` fixture; expect the full module to take tens of
minutes on one core.
"""

import itertools
import math
import time

import numpy as np
import pytest

from torusleray import ensemble, harness, leray, moments, singular
from torusleray.lattice import (
    enumerate_frequencies,
    four_tuple_count,
    multiplicity_formula_2d,
)

SEED = 2025
TWO_PI = 2.0 * math.pi
MC_ENERGIES = (5, 25, 65, 325)


def _report(name, ok, detail):
    print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="module")
def mc_runs():
    runs = {}
    for energy in MC_ENERGIES:
        cfg = harness.ExperimentConfig(
            dim=2, energy=energy, samples=20000, seed=SEED, grid=512, keep_trials=True
        )
        runs[energy] = harness.run_variance_experiment(cfg)
    return runs


def test_criterion_01_multiplicity_formula_matches_brute_force():
    t0 = time.time()
    limit = 10**4
    r = math.isqrt(limit)
    counts = np.zeros(limit + 1, dtype=np.int64)
    for a in range(-r, r + 1):
        for b in range(-r, r + 1):
            e = a * a + b * b
            if 1 <= e <= limit:
                counts[e] += 1
    mismatches = [
        e for e in range(1, limit + 1) if multiplicity_formula_2d(e) != counts[e]
    ]
    elapsed = time.time() - t0
    _report(
        "criterion 1",
        not mismatches and elapsed < 10.0,
        f"formula == brute force for all E <= 1e4, {elapsed:.2f}s (< 10s)",
    )


def test_criterion_02_four_tuple_exactness():
    t0 = time.time()
    bad = []
    for energy in range(1, 201):
        freqs = enumerate_frequencies(2, energy)
        n = freqs.multiplicity
        if n == 0:
            continue
        count = four_tuple_count(freqs)
        vset = set(freqs.vectors)
        oracle = sum(
            1
            for l1, l2, l3 in itertools.product(freqs.vectors, repeat=3)
            if tuple(a + b - c for a, b, c in zip(l1, l2, l3)) in vset
        )
        if count != oracle or count != 3 * n * n - 3 * n:
            bad.append(energy)
    from fractions import Fraction

    u4_e1 = moments.u_fourth_moment(enumerate_frequencies(2, 1))
    elapsed = time.time() - t0
    _report(
        "criterion 2",
        not bad and u4_e1 == Fraction(9, 64) and elapsed < 30.0,
        f"four_tuple_count == N^3 oracle == 3N^2-3N for E <= 200, "
        f"u4(E=1) = {u4_e1} = 9/64, {elapsed:.1f}s (< 30s)",
    )


def test_criterion_03_expectation(mc_runs):
    rep = mc_runs[325]
    target = 1.0 / math.sqrt(TWO_PI)
    diff = abs(rep.mean - target)
    ok = diff <= 3.0 * rep.standard_error
    _report(
        "criterion 3",
        ok,
        f"E=325 K=20000 surface grid 512: |{rep.mean:.6f} - {target:.6f}| = "
        f"{diff:.2e} <= 3*SE = {3 * rep.standard_error:.2e}",
    )


def test_criterion_04_second_moment_cross_validation(mc_runs):
    lines = []
    ok = True
    for energy in MC_ENERGIES:
        rep = mc_runs[energy]
        vals = np.asarray(rep.trials)
        mc_sq = float(np.mean(vals**2))
        se_sq = float(np.std(vals**2, ddof=1) / math.sqrt(len(vals)))
        quad = moments.second_moment_quadrature(enumerate_frequencies(2, energy))
        combined = math.hypot(se_sq, quad.error)
        sigmas = abs(mc_sq - quad.value) / combined
        ok &= sigmas <= 3.0
        lines.append(f"E={energy}: {sigmas:.2f} sigma")
    _report("criterion 4", ok, "MC mean of L^2 vs quadrature: " + ", ".join(lines))


def test_criterion_05_variance_decomposition():
    lines = []
    ok = True
    for energy in MC_ENERGIES:
        rep = moments.variance_decomposition(enumerate_frequencies(2, energy))
        bound = moments.RESIDUAL_COMPARATOR * float(rep.u4)
        ok &= abs(rep.residual) <= bound and rep.second_moment >= 1.0 / TWO_PI
        lines.append(f"E={energy}: |{rep.residual:.2e}| <= {bound:.2e}")
    _report("criterion 5", ok, "residual I - 1/2pi - 1/(4piN) vs 20*u4: " + ", ".join(lines))


def test_criterion_06_asymptotic_trend():
    rows = moments.asymptotic_table([25, 65, 325, 1105])
    ratios = [row["var_times_4piN"] for row in rows]
    mults = [row["multiplicity"] for row in rows]
    ok = (
        mults == [12, 16, 24, 32]
        and all(a > b for a, b in zip(ratios, ratios[1:]))
        and all(1.0 <= r <= 1.5 for r in ratios)
        and 1.0 <= ratios[-1] <= 1.25
    )
    _report(
        "criterion 6",
        ok,
        "Var*4piN decreasing over N=12,16,24,32: "
        + ", ".join(f"{r:.4f}" for r in ratios),
    )


def test_criterion_07_estimator_consistency():
    diffs = []
    for energy in (25, 325):
        freqs = enumerate_frequencies(2, energy)
        for trial in range(100):
            f = ensemble.sample(freqs, SEED, trial)
            s = leray.leray_surface_2d(f, 2048).value
            e = leray.leray_epsilon(f, 1e-3, 32768).value
            diffs.append(abs(s - e))
    worst = max(diffs)
    over = sum(1 for d in diffs if d > 2e-3)
    sine = enumerate_frequencies(2, 1)
    coeffs = np.zeros((len(sine.representatives), 2))
    for i, lam in enumerate(sine.representatives):
        if lam == (1, 0):
            coeffs[i, 1] = -1.0
    explicit = leray.leray_surface_2d(ensemble.explicit_field(sine, coeffs, 1.0), 512)
    sine_diff = abs(explicit.value - 1.0 / math.pi)
    _report(
        "criterion 7",
        worst <= 2e-3 and sine_diff <= 1e-4,
        f"max |L_eps(1e-3) - L_surface| = {worst:.2e} <= 2e-3 over 100 samples "
        f"at E in {{25,325}} ({over}/200 exceed, mean {np.mean(diffs):.1e}); "
        f"sin 2pi x1 -> |{explicit.value:.8f} - 1/pi| = {sine_diff:.1e} <= 1e-4",
    )


def test_criterion_08_bounds_suite():
    # Kac bound for a verified one-variable case
    beta = math.pi * math.sqrt(3.0)
    kac = leray.kac_bound([0.0], [1.0], alpha=0.5, beta=beta)
    kac_ok = kac["empirical_sup"] <= kac["bound"]

    # ensemble bound for a sampled field with measured (alpha, beta)
    freqs25 = enumerate_frequencies(2, 25)
    f = ensemble.sample(freqs25, SEED, 0)
    n = 1024
    vals = np.asarray(f.evaluate_grid(n))
    idx = np.argwhere(np.abs(vals) <= 0.2)
    grads = f.gradient(idx / n)
    beta_f = 0.9 * float(np.min(np.hypot(grads[:, 0], grads[:, 1])))
    ens = leray.ensemble_bound(f, alpha=0.2, beta=beta_f, grid=n)

    # u-bounds on 1e5 points at E=325 with the default cube mesh
    freqs = enumerate_frequencies(2, 325)
    dec = singular.classify_cubes(freqs)
    ub = singular.u_bounds_check(freqs, dec, 100000, seed=SEED)
    meas_ok = dec.measB <= 16**4 * float(moments.u_fourth_moment(freqs))

    # Hessian: exact at the origin, then 100 certified points near it
    origin = singular.hessian_definiteness(freqs, [0.0, 0.0])
    exact = -4.0 * math.pi**2 * freqs.energy / freqs.dim
    origin_ok = origin["eigenvalues"] == pytest.approx([exact, exact], rel=1e-12)
    rng = np.random.default_rng(SEED)
    h = 1.0 / dec.cubes_per_axis
    hess_ok = all(
        singular.hessian_definiteness(freqs, pt)["ok"]
        for pt in rng.random((100, 2)) * h
    )

    ok = kac_ok and ens["dominates"] and ub["ok"] and meas_ok and origin_ok and hess_ok
    _report(
        "criterion 8",
        ok,
        f"kac sup {kac['empirical_sup']:.3f} <= {kac['bound']:.3f}; ensemble bound "
        f"dominates={ens['dominates']}; u-bounds ok on 1e5 points "
        f"({ub['regular_samples']} regular); measB {dec.measB:.2e} <= 16^4 u4; "
        f"Hessian exact at origin ({exact:.1f}) and at 100 certified points",
    )


def test_criterion_09_jacobian_rank():
    rng = np.random.default_rng(SEED)
    ok = True
    for d, energy in ((2, 5), (2, 325), (3, 2)):
        freqs = enumerate_frequencies(d, energy)
        for x in rng.random((200, d)):
            ok &= ensemble.jacobian_rank(freqs, x) == d + 1
    _report("criterion 9", ok, "jacobian_rank == d+1 at 200 random points for (2,5), (2,325), (3,2)")


def test_criterion_10_higher_dimension_reporting():
    ok = True
    worst = 0.0
    for energy in range(1, 51):
        freqs = enumerate_frequencies(3, energy)
        if freqs.multiplicity == 0:
            continue
        out = moments.fourth_moment_bound_check(freqs)
        ratio = out["ratio"]
        ok &= math.isfinite(ratio) and ratio > 0
        ok &= moments.u_fourth_moment(freqs) <= moments.u_second_moment(freqs)
        worst = max(worst, ratio)
    _report(
        "criterion 10",
        ok,
        f"d=3, E <= 50: u4*N^2/E^0 finite (max {worst:.2f}); u4 <= 1/N throughout",
    )
