import math
from fractions import Fraction

import numpy as np
import pytest

from torusleray import ensemble, moments
from torusleray.errors import (
    EmptyEnsembleError,
    GeometryError,
    PreconditionError,
    ResolutionError,
)
from torusleray.lattice import enumerate_frequencies

TWO_PI = 2.0 * math.pi


def test_u_second_moment_exact(freqs_e325):
    assert moments.u_second_moment(freqs_e325) == Fraction(1, 24)
    assert moments.u_second_moment(enumerate_frequencies(2, 1)) == Fraction(1, 4)


def test_u_second_moment_empty():
    with pytest.raises(EmptyEnsembleError):
        moments.u_second_moment(enumerate_frequencies(2, 3))


def test_u_fourth_moment_e1():
    # (1/4)(cos A + cos B) has exact fourth moment 9/64
    assert moments.u_fourth_moment(enumerate_frequencies(2, 1)) == Fraction(9, 64)


def test_u_fourth_moment_diagonal_2d():
    for energy in (5, 25, 65, 325):
        freqs = enumerate_frequencies(2, energy)
        n = freqs.multiplicity
        assert moments.u_fourth_moment(freqs) == Fraction(3 * (n - 1), n**3)


def test_u_moments_by_grid_quadrature(freqs_e25):
    # trapezoid rule is exact for trigonometric polynomials below Nyquist
    n = 64
    u = ensemble.two_point_grid(freqs_e25, n)
    assert np.mean(u**2) == pytest.approx(float(moments.u_second_moment(freqs_e25)), abs=1e-14)
    assert np.mean(u**4) == pytest.approx(float(moments.u_fourth_moment(freqs_e25)), abs=1e-12)


def test_u4_below_u2():
    for d, energy in ((2, 5), (2, 325), (3, 2), (3, 50)):
        freqs = enumerate_frequencies(d, energy)
        assert moments.u_fourth_moment(freqs) <= moments.u_second_moment(freqs)


def test_local_model_taylor(freqs_e325):
    # 1 - u(h)^2 = (4 pi^2 E / d) |h|^2 (1 + o(1)) near the origin
    c0 = moments.local_model_slope(freqs_e325)
    for h in ([1e-3, 0.0], [7e-4, 7e-4], [0.0, 1e-3]):
        h = np.asarray(h)
        u = ensemble.two_point(freqs_e325, h)
        ratio = (1.0 - u * u) / (c0 * np.hypot(*h)) ** 2
        assert 0.99 <= ratio <= 1.01


def test_quadrature_lower_bound_and_refinement():
    for energy in (5, 25):
        freqs = enumerate_frequencies(2, energy)
        q = moments.second_moment_quadrature(freqs, grid=512)
        assert q.value >= 1.0 / TWO_PI
        q2 = moments.second_moment_quadrature(freqs, grid=1024)
        assert abs(q.value - q2.value) < 1e-6


def test_quadrature_pointwise_refinement_error_estimate(freqs_e25):
    q = moments.second_moment_quadrature(freqs_e25, grid=1024)
    q2 = moments.second_moment_quadrature(freqs_e25, grid=2048)
    assert abs(q2.value - q.value) <= max(q.error, 1e-12)


def test_quadrature_stable_under_rho_halving(freqs_e25):
    a = moments.second_moment_quadrature(freqs_e25, grid=1024, rho=0.04)
    b = moments.second_moment_quadrature(freqs_e25, grid=1024, rho=0.02)
    assert a.value == pytest.approx(b.value, abs=1e-7)


def test_quadrature_rejects_degenerate():
    with pytest.raises(PreconditionError, match="degenerate frequency set"):
        moments.second_moment_quadrature(enumerate_frequencies(2, 1))


def test_quadrature_rejects_bad_geometry(freqs_e25):
    with pytest.raises(GeometryError):
        moments.second_moment_quadrature(freqs_e25, grid=512, rho=0.4)
    with pytest.raises(ResolutionError):
        moments.second_moment_quadrature(freqs_e25, grid=16)


def test_quadrature_exceeds_second_order_bound(freqs_e25):
    # pointwise 1/sqrt(1-u^2) >= 1 + u^2/2
    q = moments.second_moment_quadrature(freqs_e25, grid=1024)
    lower = (1.0 + 0.5 * float(moments.u_second_moment(freqs_e25))) / TWO_PI
    assert q.value >= lower


def test_variance_decomposition_report(freqs_e325):
    rep = moments.variance_decomposition(freqs_e325, grid=512)
    assert rep.multiplicity == 24
    assert rep.variance == pytest.approx(rep.second_moment - 1.0 / TWO_PI)
    assert rep.residual_within_bound
    assert 1.0 <= rep.var_times_4piN <= 1.5
    d = rep.to_json_dict()
    assert d["u2"] == "1/24"
    assert rep.csv_row().startswith("2,325,24,")


def test_residual_sign_positive_small_multiplicity():
    rep = moments.variance_decomposition(enumerate_frequencies(2, 5), grid=512)
    assert rep.residual > 0


def test_fourth_moment_bound_check():
    out = moments.fourth_moment_bound_check(enumerate_frequencies(2, 325))
    assert out["ok"]
    assert out["u4_times_N2"] == Fraction(3 * 23, 24)
    out3 = moments.fourth_moment_bound_check(enumerate_frequencies(3, 2))
    assert math.isfinite(out3["ratio"])


def test_asymptotic_table_skips_degenerate():
    rows = moments.asymptotic_table([3, 1, 25], grid=512)
    assert "skipped" in rows[0] and "N=0" in rows[0]["skipped"]
    assert "skipped" in rows[1]
    assert rows[2]["multiplicity"] == 12


def test_quadrature_symmetry(freqs_e25):
    # u is invariant under signed coordinate permutation; the integrand
    # restricted to one octant reproduces the full value
    n = 512
    u = ensemble.two_point_grid(freqs_e25, n)
    assert np.allclose(u, u.T, atol=1e-12)
    assert np.allclose(u, np.flip(np.roll(u, -1, axis=0), axis=0), atol=1e-12)
