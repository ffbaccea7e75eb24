"""Leray-measure estimators and the explicit level-set bounds.

Two independent routes to the same quantity: the epsilon-level estimator
(1/2eps) meas{|f| < eps} on a midpoint grid, and the nodal-surface integral
of 1/|grad f| extracted by marching squares (d=2).
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, HypothesisError, ResolutionError, TorusLerayError

TWO_PI = 2.0 * math.pi

#: grid vertices with |f| below this (relative to max coefficient) get nudged
ZERO_NUDGE = 1e-12
#: gradient norms below this at a segment midpoint flag a near-singular sample
NEAR_SINGULAR_GRAD = 1e-8


@dataclass(frozen=True)
class LerayEstimate:
    value: float
    method: str  # "epsilon_level" | "surface_integral"
    epsilon: float  # 0 for the surface method
    grid: int
    error_hint: float
    warning: str | None = None

    def to_json_dict(self) -> dict:
        return {
            "value": self.value,
            "method": self.method,
            "epsilon": self.epsilon,
            "grid": self.grid,
            "error_hint": self.error_hint,
            "warning": self.warning,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    def csv_row(self) -> str:
        return f"{self.method},{self.epsilon},{self.grid},{self.value!r},{self.error_hint!r}"


def _max_energy(f) -> int:
    freqs = getattr(f, "freqs", None)
    return freqs.max_energy if freqs is not None and freqs.vectors else 0


def default_grid(f) -> int:
    """16 points per oscillation wavelength, at least 128 per axis."""
    return max(128, 16 * math.isqrt(max(_max_energy(f) - 1, 0)) + 16)


def _nyquist_floor(f) -> int:
    return 8 * math.ceil(math.sqrt(_max_energy(f))) if _max_energy(f) else 8


def _check_grid(f, grid: int) -> None:
    floor = _nyquist_floor(f)
    if grid < floor:
        raise ResolutionError(f"grid {grid} below Nyquist margin {floor}")


def leray_epsilon(f, eps: float, grid: int | None = None) -> LerayEstimate:
    """(1/2eps) * fraction of midpoint-grid points with |f| < eps."""
    if eps <= 0:
        raise DomainError(f"epsilon must be positive, got {eps}")
    n = default_grid(f) if grid is None else int(grid)
    _check_grid(f, n)
    d = f.dim
    if d == 2:
        count = f.count_below(n, eps)
    else:
        count = 0
        axis = (np.arange(n) + 0.5) / n
        tail = np.stack([g.ravel() for g in np.meshgrid(axis, axis, indexing="ij")], axis=1)
        for head in itertools.product(axis, repeat=d - 2):
            pts = np.empty((n * n, d))
            pts[:, : d - 2] = head
            pts[:, d - 2 :] = tail
            count += int(np.count_nonzero(np.abs(f.evaluate(pts)) < eps))
    total = n**d
    value = count / total / (2.0 * eps)
    # counting a band of area 2*eps*L with cell size h fluctuates ~ sqrt(count)
    err = math.sqrt(max(count, 1)) / total / (2.0 * eps)
    return LerayEstimate(value=value, method="epsilon_level", epsilon=eps, grid=n, error_hint=err)


def leray_surface_2d(f, grid: int | None = None) -> LerayEstimate:
    """Marching-squares extraction of the zero set; accumulates
    segment length / |grad f| at segment midpoints."""
    if f.dim != 2:
        raise DomainError("surface estimator is 2-d only")
    n = default_grid(f) if grid is None else int(grid)
    _check_grid(f, n)
    vals = np.array(f.evaluate_grid(n))
    if vals.min() > 0 or vals.max() < 0:
        return LerayEstimate(0.0, "surface_integral", 0.0, n, 0.0)
    nudge = ZERO_NUDGE * max(getattr(f, "max_abs_coeff", 1.0), 1e-300)
    vals[vals == 0.0] = nudge

    from . import _kernels as kernels

    value, nseg, min_grad = kernels.surface_integral_2d(vals, f._lam, f.coeffs, f.scale)
    # leading bias is quadratic in (wavenumber * cell size)
    err = value * (TWO_PI * math.sqrt(max(_max_energy(f), 1)) / n) ** 2
    warning = None
    if nseg and min_grad < NEAR_SINGULAR_GRAD:
        warning = f"near-singular gradient {min_grad:.3e} on extracted contour"
    return LerayEstimate(
        value=float(value),
        method="surface_integral",
        epsilon=0.0,
        grid=n,
        error_hint=float(err),
        warning=warning,
    )


def _measure_below_1d(vals: np.ndarray, eps: float) -> float:
    return float(np.count_nonzero(np.abs(vals) < eps)) / vals.size


def kac_bound(
    cos_coeffs,
    sin_coeffs,
    alpha: float,
    beta: float,
    grid: int = 1 << 16,
    eps_schedule=None,
) -> dict:
    """Level-measure bound 2M/beta for a one-variable trigonometric
    polynomial of degree M, given |g| < alpha implies |g'| > beta.

    The hypothesis is verified on a fine grid; returns the bound together
    with the empirical sup of (1/2eps) meas{|g| < eps} over eps < alpha.
    """
    a = np.asarray(cos_coeffs, dtype=np.float64)
    b = np.asarray(sin_coeffs, dtype=np.float64)
    if a.size != b.size or a.size == 0:
        raise DomainError("cos/sin coefficient arrays must be nonempty, equal length")
    if alpha <= 0 or beta <= 0:
        raise DomainError("alpha, beta must be positive")
    degree = int(max(np.max(np.nonzero(a)[0], initial=-1), np.max(np.nonzero(b)[0], initial=-1)))
    if degree < 0:
        raise DomainError("zero polynomial")
    degree += 1  # index k corresponds to frequency k+1
    k = np.arange(1, a.size + 1)
    t = (np.arange(grid) + 0.5) / grid
    phases = TWO_PI * np.outer(t, k)
    g = np.cos(phases) @ a + np.sin(phases) @ b
    gp = TWO_PI * (-np.sin(phases) @ (k * a) + np.cos(phases) @ (k * b))
    low = np.abs(g) < alpha
    if np.any(low) and np.min(np.abs(gp[low])) <= beta:
        raise HypothesisError("|g| < alpha does not force |g'| > beta on the grid")
    if eps_schedule is None:
        eps_schedule = [alpha * (0.5**j) for j in range(1, 9)]
    eps_schedule = [e for e in eps_schedule if 0 < e < alpha]
    estimates = [(e, _measure_below_1d(g, e) / (2 * e)) for e in eps_schedule]
    sup = max(v for _, v in estimates) if estimates else 0.0
    return {
        "degree": degree,
        "bound": 2.0 * degree / beta,
        "empirical_sup": sup,
        "estimates": estimates,
    }


def ensemble_bound(f, alpha: float, beta: float, grid: int | None = None, eps_schedule=None) -> dict:
    """Bound d^{3/2} * 2 sqrt(E_max) / beta once membership in the class
    {|f| <= alpha implies |grad f| > beta} is verified on a dense grid."""
    if alpha <= 0 or beta <= 0:
        raise DomainError("alpha, beta must be positive")
    if f.dim != 2:
        raise TorusLerayError("grid membership verification implemented for d=2")
    n = default_grid(f) if grid is None else int(grid)
    _check_grid(f, n)
    vals = np.asarray(f.evaluate_grid(n))
    low = np.abs(vals) <= alpha
    if np.any(low):
        idx = np.argwhere(low)
        pts = idx / n
        grads = f.gradient(pts)
        if np.min(np.hypot(grads[:, 0], grads[:, 1])) <= beta:
            raise HypothesisError("|f| <= alpha does not force |grad f| > beta on the grid")
    e_max = max(_max_energy(f), 1)
    bound = f.dim**1.5 * 2.0 * math.sqrt(e_max) / beta
    if eps_schedule is None:
        eps_schedule = [alpha / 2, alpha / 8, alpha / 32]
    eps_schedule = [e for e in eps_schedule if 0 < e < alpha]
    estimates = [(e, leray_epsilon(f, e, grid=n).value) for e in eps_schedule]
    return {
        "bound": bound,
        "estimates": estimates,
        "dominates": all(v <= bound for _, v in estimates),
    }


def epsilon_convergence(f, eps_schedule, grid: int | None = None) -> dict:
    """Level-measure estimates along a decreasing epsilon schedule with a
    crude convergence estimate (no monotonicity is asserted)."""
    schedule = list(eps_schedule)
    if not schedule or any(e <= 0 for e in schedule):
        raise DomainError("schedule must be positive")
    if any(b >= a for a, b in zip(schedule, schedule[1:])):
        raise DomainError("schedule must be decreasing")
    values = [(e, leray_epsilon(f, e, grid=grid).value) for e in schedule]
    if len(values) >= 2:
        estimate = abs(values[-1][1] - values[-2][1])
    else:
        estimate = math.inf
    return {"values": values, "convergence_estimate": estimate}
