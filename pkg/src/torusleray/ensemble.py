"""Gaussian random eigenfunctions: sampling, evaluation, covariance.

Reproducibility contract: coefficients for trial t of master seed s are
drawn from numpy's PCG64 seeded with SeedSequence(s, spawn_key=(t,)),
using Generator.standard_normal (ziggurat). Identical (seed, trial) gives
bitwise-identical coefficients on any platform with the same numpy.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as kernels
from .errors import EmptyEnsembleError, TorusLerayError
from .lattice import FrequencySet

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class RandomEigenfunction:
    """A trigonometric polynomial  scale * sum [b cos 2pi<lam,x> - c sin ...]
    over the canonical representatives of a frequency set."""

    freqs: FrequencySet
    coeffs: np.ndarray  # (m, 2) pairs (b, c)
    scale: float
    seed: int | None = None
    trial: int | None = None
    _lam: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        lam = np.asarray(self.freqs.representatives, dtype=np.float64)
        object.__setattr__(self, "_lam", lam.reshape(-1, self.freqs.dim))
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=np.float64))

    @property
    def dim(self) -> int:
        return self.freqs.dim

    @property
    def max_abs_coeff(self) -> float:
        return float(np.abs(self.coeffs).max(initial=0.0))

    def evaluate(self, x) -> np.ndarray | float:
        pts = np.atleast_2d(np.asarray(x, dtype=np.float64))
        vals = kernels.eval_points(self._lam, self.coeffs, self.scale, pts)
        return float(vals[0]) if np.ndim(x) == 1 else vals

    def gradient(self, x) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(x, dtype=np.float64))
        grads = kernels.eval_gradient(self._lam, self.coeffs, self.scale, pts)
        return grads[0] if np.ndim(x) == 1 else grads

    def hessian(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        theta = TWO_PI * (self._lam @ x)
        w = self.coeffs[:, 0] * np.cos(theta) - self.coeffs[:, 1] * np.sin(theta)
        h = -(TWO_PI**2) * self.scale * np.einsum("k,ki,kj->ij", w, self._lam, self._lam)
        return 0.5 * (h + h.T)

    def evaluate_grid(self, n: int) -> np.ndarray:
        if self.dim != 2:
            raise TorusLerayError("evaluate_grid is 2-d only")
        return kernels.eval_grid_2d(self._lam, self.coeffs, self.scale, n)

    def count_below(self, n: int, eps: float) -> int:
        """Midpoint-grid count of |f| < eps (2-d fast path)."""
        return kernels.count_below_2d(self._lam, self.coeffs, self.scale, n, eps)

    def to_json_dict(self) -> dict:
        return {
            "dim": self.freqs.dim,
            "energy": self.freqs.energy,
            "seed": self.seed,
            "trial": self.trial,
            "coeffs": [[float(b), float(c)] for b, c in self.coeffs],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())


class ConstantField:
    """Deterministic constant test function: duck-types the estimator API."""

    def __init__(self, value: float, dim: int = 2):
        self.value = float(value)
        self.dim = dim
        self.freqs = None
        self.max_abs_coeff = abs(self.value)

    def evaluate(self, x):
        pts = np.atleast_2d(np.asarray(x, dtype=np.float64))
        vals = np.full(pts.shape[0], self.value)
        return float(vals[0]) if np.ndim(x) == 1 else vals

    def gradient(self, x):
        pts = np.atleast_2d(np.asarray(x, dtype=np.float64))
        grads = np.zeros((pts.shape[0], self.dim))
        return grads[0] if np.ndim(x) == 1 else grads

    def evaluate_grid(self, n):
        return np.full((n, n), self.value)

    def count_below(self, n, eps):
        return n * n if abs(self.value) < eps else 0


def trial_rng(seed: int, trial: int = 0) -> np.random.Generator:
    """Independent, reproducible substream for one trial of a master seed."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))


def sample(freqs: FrequencySet, seed: int, trial: int = 0) -> RandomEigenfunction:
    """Draw one random eigenfunction (N independent standard normals)."""
    if freqs.multiplicity < 2:
        raise EmptyEnsembleError(f"multiplicity {freqs.multiplicity} < 2 at E={freqs.energy}")
    rng = trial_rng(seed, trial)
    coeffs = rng.standard_normal((freqs.multiplicity // 2, 2))
    return RandomEigenfunction(
        freqs=freqs,
        coeffs=coeffs,
        scale=math.sqrt(2.0 / freqs.multiplicity),
        seed=seed,
        trial=trial,
    )


def explicit_field(freqs: FrequencySet, coeffs, scale: float = 1.0) -> RandomEigenfunction:
    """Deterministic trigonometric polynomial with hand-picked coefficients."""
    return RandomEigenfunction(freqs=freqs, coeffs=np.asarray(coeffs, float), scale=scale)


def _full_lam(freqs: FrequencySet) -> np.ndarray:
    if not freqs.vectors:
        raise EmptyEnsembleError("empty frequency set")
    return np.asarray(freqs.vectors, dtype=np.float64)


def two_point(freqs: FrequencySet, z) -> np.ndarray | float:
    """u(z) = (1/N) sum over Lambda of cos 2pi<lambda, z>."""
    lam = _full_lam(freqs)
    z_arr = np.asarray(z, dtype=np.float64)
    vals = np.mean(np.cos(TWO_PI * (np.atleast_2d(z_arr) @ lam.T)), axis=1)
    return float(vals[0]) if z_arr.ndim == 1 else vals


def two_point_grid(freqs: FrequencySet, n: int) -> np.ndarray:
    if freqs.dim != 2:
        raise TorusLerayError("two_point_grid is 2-d only")
    lam = np.asarray(freqs.representatives, dtype=np.float64)
    return kernels.u_grid_2d(lam, freqs.multiplicity, n)


def covariance(freqs: FrequencySet, z) -> tuple[np.ndarray, float]:
    """Covariance matrix of (f(x), f(x+z)) and its determinant 1 - u(z)^2."""
    u = two_point(freqs, z)
    sigma = np.array([[1.0, u], [u, 1.0]])
    return sigma, float(1.0 - u * u)


def two_point_gradient(freqs: FrequencySet, z) -> np.ndarray:
    lam = _full_lam(freqs)
    z = np.asarray(z, dtype=np.float64)
    return -(TWO_PI / freqs.multiplicity) * (np.sin(TWO_PI * (lam @ z)) @ lam)


def two_point_hessian(freqs: FrequencySet, z) -> np.ndarray:
    lam = _full_lam(freqs)
    z = np.asarray(z, dtype=np.float64)
    w = np.cos(TWO_PI * (lam @ z))
    h = -(TWO_PI**2) / freqs.multiplicity * np.einsum("k,ki,kj->ij", w, lam, lam)
    return 0.5 * (h + h.T)


def direction_average(freqs: FrequencySet, xi) -> float:
    """sum over Lambda of <lambda, xi>^2, which the W_d symmetry forces to
    equal (sum |lambda|^2) * |xi|^2 / d; checked exactly for integer xi."""
    if not freqs.vectors:
        raise EmptyEnsembleError("empty frequency set")
    total = sum(sum(a * b for a, b in zip(lam, xi)) ** 2 for lam in freqs.vectors)
    if all(isinstance(c, int) or float(c).is_integer() for c in xi):
        xi_int = [int(c) for c in xi]
        lhs = freqs.dim * sum(
            sum(a * b for a, b in zip(lam, xi_int)) ** 2 for lam in freqs.vectors
        )
        rhs = sum(sum(c * c for c in lam) for lam in freqs.vectors) * sum(c * c for c in xi_int)
        if lhs != rhs:
            raise TorusLerayError("direction-average identity violated; Lambda not symmetric?")
    return float(total)


def jacobian_rank(freqs: FrequencySet, x, tol: float = 1e-8) -> int:
    """Numerical rank of the (d+1) x N evaluation-and-gradient matrix whose
    maximal rank makes the singular set a positive-codimension manifold."""
    lam = np.asarray(freqs.representatives, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    d = freqs.dim
    theta = TWO_PI * (lam @ x)
    ct, st = np.cos(theta), np.sin(theta)
    norm = max(1.0, math.sqrt(freqs.max_energy))
    mat = np.empty((d + 1, 2 * lam.shape[0]))
    mat[:d, 0::2] = (st[:, None] * lam).T / norm
    mat[:d, 1::2] = (ct[:, None] * lam).T / norm
    mat[d, 0::2] = ct
    mat[d, 1::2] = -st
    sv = np.linalg.svd(mat, compute_uv=False)
    return int(np.count_nonzero(sv > tol * sv[0]))
