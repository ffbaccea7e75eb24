"""Exact moment identities and the second-moment quadrature.

The second moment of the Leray measure is (1/2pi) * integral of
1/sqrt(1 - u(z)^2) over the torus.  The integrand blows up like
1/(c0 |z - z0|) at the finitely many points z0 where u = +-1, with
c0 = 2 pi sqrt(Ebar/d) and Ebar the average squared frequency norm
(the local expansion 1 - u^2 ~ (4 pi^2 Ebar / d) |z - z0|^2, validated
numerically in the test suite).  We subtract a smooth-cutoff copy of the
local model before applying the (spectrally accurate) trapezoid rule and
add the model's mass back analytically.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import ensemble
from .errors import (
    EmptyEnsembleError,
    GeometryError,
    PreconditionError,
    ResolutionError,
)
from .lattice import FrequencySet, check_nondegeneracy, four_tuple_count, half_dual_set

TWO_PI = 2.0 * math.pi

#: comparator constant for |residual| <= C * int(u^4), calibrated once
#: against the grid-1024 quadrature and frozen
RESIDUAL_COMPARATOR = 20.0


def u_second_moment(freqs: FrequencySet) -> Fraction:
    """Exactly 1/N by orthogonality of the exponentials."""
    if freqs.multiplicity == 0:
        raise EmptyEnsembleError("empty frequency set")
    return Fraction(1, freqs.multiplicity)


def u_fourth_moment(freqs: FrequencySet) -> Fraction:
    """Exact rational: (additive 4-tuple count) / N^4."""
    n = freqs.multiplicity
    if n == 0:
        raise EmptyEnsembleError("empty frequency set")
    return Fraction(four_tuple_count(freqs), n**4)


def singular_points(freqs: FrequencySet) -> tuple[np.ndarray, np.ndarray]:
    """Float positions and signs of the points where u = +-1."""
    half = half_dual_set(freqs)
    pts = np.array([[float(c) for c in p] for p in half.points], dtype=np.float64)
    return pts, np.asarray(half.signs, dtype=np.int64)


def local_model_slope(freqs: FrequencySet) -> float:
    """c0 with 1 - u^2 ~ (c0 r)^2 near each singular point."""
    return TWO_PI * math.sqrt(float(freqs.mean_energy) / freqs.dim)


def _min_wrapped_distance(pts: np.ndarray) -> float:
    if pts.shape[0] < 2:
        return 0.5  # lone singular point; any excision radius < 1/4 is safe
    best = math.inf
    for i in range(pts.shape[0] - 1):
        delta = pts[i + 1 :] - pts[i]
        delta -= np.round(delta)
        best = min(best, float(np.min(np.sqrt(np.sum(delta * delta, axis=1)))))
    return best


def default_rho(freqs: FrequencySet) -> float:
    pts, _ = singular_points(freqs)
    return min(0.05, _min_wrapped_distance(pts) / 4.0)


def _cutoff_mass(d: int, rho: float, c0: float) -> float:
    """Integral of chi(r/rho)/(c0 r) over the ball, chi(s) = (1 - s^2)^4."""
    sphere_area = 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)
    radial = 0.5 * math.gamma((d - 1) / 2.0) * math.gamma(5.0) / math.gamma((d - 1) / 2.0 + 5.0)
    return sphere_area * rho ** (d - 1) / c0 * radial


def _subtracted_integrand(u: np.ndarray, r2_list, rho: float, c0: float) -> np.ndarray:
    """1/sqrt(1-u^2) minus the cutoff local model at every singular point.

    `r2_list` holds squared wrapped distances to each singular point; the
    removable singularities are patched with the continuous limit 0.
    """
    det = 1.0 - u * u
    near_any = np.zeros(u.shape, dtype=bool)
    model = np.zeros(u.shape)
    for r2 in r2_list:
        inside = r2 < rho * rho
        r = np.sqrt(r2[inside])
        s2 = r2[inside] / (rho * rho)
        with np.errstate(divide="ignore"):
            model[inside] += (1.0 - s2) ** 4 / (c0 * r)
        near_any |= r2 < 1e-24
    out = np.empty(u.shape)
    ok = ~near_any
    out[ok] = 1.0 / np.sqrt(det[ok]) - model[ok]
    out[near_any] = 0.0
    return out


def _wrapped_r2_grid_2d(n: int, center: np.ndarray) -> np.ndarray:
    x = np.arange(n) / n
    dx = x - center[0]
    dy = x - center[1]
    dx -= np.round(dx)
    dy -= np.round(dy)
    return dx[:, None] ** 2 + dy[None, :] ** 2


def _integral_once(freqs: FrequencySet, n: int, rho: float, pts: np.ndarray, c0: float) -> float:
    d = freqs.dim
    if d == 2:
        u = ensemble.two_point_grid(freqs, n)
        r2 = [_wrapped_r2_grid_2d(n, p) for p in pts]
        smooth = float(np.mean(_subtracted_integrand(u, r2, rho, c0)))
    else:
        axis = np.arange(n) / n
        tail = np.stack([g.ravel() for g in np.meshgrid(axis, axis, indexing="ij")], axis=1)
        total = 0.0
        for head in itertools.product(axis, repeat=d - 2):
            block = np.empty((n * n, d))
            block[:, : d - 2] = head
            block[:, d - 2 :] = tail
            u = np.asarray(ensemble.two_point(freqs, block))
            delta = block[:, None, :] - pts[None, :, :]
            delta -= np.round(delta)
            r2 = np.sum(delta * delta, axis=2)
            total += float(np.sum(_subtracted_integrand(u, [r2[:, i] for i in range(pts.shape[0])], rho, c0)))
        smooth = total / n**d
    return smooth + pts.shape[0] * _cutoff_mass(d, rho, c0)


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float
    grid: int
    rho: float


def second_moment_quadrature(
    freqs: FrequencySet, grid: int | None = None, rho: float | None = None
) -> QuadratureResult:
    """(1/2pi) * integral of (1 - u^2)^{-1/2}, with refinement error estimate."""
    if freqs.multiplicity == 0:
        raise EmptyEnsembleError("empty frequency set")
    if not check_nondegeneracy(freqs):
        raise PreconditionError(
            f"degenerate frequency set (d={freqs.dim}, E={freqs.energy}): "
            "second-moment formula requires the non-degeneracy condition"
        )
    pts, _ = singular_points(freqs)
    min_dist = _min_wrapped_distance(pts)
    if rho is None:
        rho = min(0.05, min_dist / 4.0)
    if not 0 < rho < min_dist / 2.0:
        raise GeometryError(f"rho={rho} must lie in (0, {min_dist / 2.0}) for this set")
    if grid is None:
        grid = max(512, 8 * math.ceil(math.sqrt(freqs.max_energy)))
    nyquist = 4 * math.ceil(math.sqrt(freqs.max_energy))
    if grid < nyquist:
        raise ResolutionError(f"grid {grid} below Nyquist margin {nyquist}")
    if grid * rho < 4:
        raise GeometryError(f"rho={rho} unresolved by grid {grid}")
    c0 = local_model_slope(freqs)
    fine = _integral_once(freqs, grid, rho, pts, c0)
    coarse = _integral_once(freqs, grid // 2, rho, pts, c0)
    return QuadratureResult(
        value=fine / TWO_PI, error=abs(fine - coarse) / TWO_PI, grid=grid, rho=rho
    )


@dataclass(frozen=True)
class MomentReport:
    dim: int
    energy: int
    multiplicity: int
    u2: Fraction
    u4: Fraction
    second_moment: float
    quadrature_error: float
    grid: int
    rho: float

    @property
    def expectation_sq(self) -> float:
        return 1.0 / TWO_PI

    @property
    def predicted_correction(self) -> float:
        return 1.0 / (2.0 * TWO_PI * self.multiplicity)

    @property
    def variance(self) -> float:
        return self.second_moment - self.expectation_sq

    @property
    def var_times_4piN(self) -> float:
        return self.variance * 2.0 * TWO_PI * self.multiplicity

    @property
    def residual(self) -> float:
        return self.second_moment - self.expectation_sq - self.predicted_correction

    @property
    def residual_within_bound(self) -> bool:
        return abs(self.residual) <= RESIDUAL_COMPARATOR * float(self.u4)

    def to_json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "energy": self.energy,
            "multiplicity": self.multiplicity,
            "u2": str(self.u2),
            "u4": str(self.u4),
            "second_moment": self.second_moment,
            "expectation_sq": self.expectation_sq,
            "predicted_correction": self.predicted_correction,
            "variance": self.variance,
            "var_times_4piN": self.var_times_4piN,
            "residual": self.residual,
            "residual_comparator": RESIDUAL_COMPARATOR * float(self.u4),
            "quadrature_error": self.quadrature_error,
            "grid": self.grid,
            "rho": self.rho,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    def csv_row(self) -> str:
        return (
            f"{self.dim},{self.energy},{self.multiplicity},{float(self.u2)!r},"
            f"{float(self.u4)!r},{self.second_moment!r},{self.variance!r},"
            f"{self.var_times_4piN!r},{self.residual!r},{self.grid},{self.rho!r}"
        )

    CSV_HEADER = "dim,energy,N,u2,u4,I,var,var_times_4piN,residual,grid,rho"


def variance_decomposition(
    freqs: FrequencySet, grid: int | None = None, rho: float | None = None
) -> MomentReport:
    quad = second_moment_quadrature(freqs, grid=grid, rho=rho)
    return MomentReport(
        dim=freqs.dim,
        energy=freqs.energy,
        multiplicity=freqs.multiplicity,
        u2=u_second_moment(freqs),
        u4=u_fourth_moment(freqs),
        second_moment=quad.value,
        quadrature_error=quad.error,
        grid=quad.grid,
        rho=quad.rho,
    )


def fourth_moment_bound_check(freqs: FrequencySet) -> dict:
    """d=2: exact check u4 * N^2 <= 3; d>=3: report the normalized ratio
    u4 * N^2 / E^{(d-3)/2} without asserting any constant."""
    n = freqs.multiplicity
    u4 = u_fourth_moment(freqs)
    scaled = u4 * n * n
    out = {"dim": freqs.dim, "energy": freqs.energy, "multiplicity": n, "u4": u4}
    if freqs.dim == 2:
        out["u4_times_N2"] = scaled
        out["bound"] = 3
        out["ok"] = scaled <= 3
    else:
        out["u4_times_N2"] = scaled
        out["ratio"] = float(scaled) / float(freqs.energy) ** ((freqs.dim - 3) / 2.0)
    return out


def asymptotic_table(
    energies, dim: int = 2, grid: int | None = None, rho: float | None = None
) -> list[dict]:
    """One row per energy: (E, N, Var, Var*4piN, u4, residual); degenerate
    or empty eigenspaces are skipped with a note."""
    from .lattice import enumerate_frequencies

    rows = []
    for energy in energies:
        freqs = enumerate_frequencies(dim, energy)
        if freqs.multiplicity == 0:
            rows.append({"energy": energy, "skipped": "empty eigenspace (N=0)"})
            continue
        if not check_nondegeneracy(freqs):
            rows.append({"energy": energy, "skipped": "degenerate frequency set"})
            continue
        report = variance_decomposition(freqs, grid=grid, rho=rho)
        rows.append(
            {
                "energy": energy,
                "multiplicity": report.multiplicity,
                "variance": report.variance,
                "var_times_4piN": report.var_times_4piN,
                "u4": float(report.u4),
                "residual": report.residual,
            }
        )
    return rows
