"""Detection of near-degenerate regions of the two-point function.

A torus point is "positive singular" when the cosine cos 2pi<lam, x>
exceeds 3/4 for more than a 1 - 1/(4d) fraction of the frequencies, and
"negative singular" with cos below -3/4.  Cubes of side 1/M containing
such a point inherit the label.  On the complement |u| stays below
1 - 1/(16d), while certified singular points keep |u| above 1/16 and a
definite Hessian; those bounds are what the estimator error analysis
leans on, and this module checks them by direct evaluation.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as kernels
from . import ensemble
from .errors import CapacityError, DomainError, EmptyEnsembleError, PreconditionError
from .lattice import FrequencySet

TWO_PI = 2.0 * math.pi

#: cosine threshold in the singular-point definition
COS_THRESHOLD = 0.75
#: relaxed threshold propagated from a witness to its whole cube
CUBE_COS_THRESHOLD = 0.5
#: largest cube count classify_cubes will enumerate
_MAX_CUBES = 1 << 26
_POINT_BLOCK = 1 << 18

POSITIVE = "positive"
NEGATIVE = "negative"
REGULAR = "regular"


def default_cubes_per_axis(freqs: FrequencySet) -> int:
    return int(16.0 * math.pi * math.sqrt(freqs.dim) * math.sqrt(freqs.energy))


def density_threshold(dim: int) -> float:
    return 1.0 - 1.0 / (4.0 * dim)


def _fractions(freqs: FrequencySet, pts: np.ndarray, threshold: float) -> np.ndarray:
    lam = np.asarray(freqs.vectors, dtype=np.float64)
    out = np.empty((pts.shape[0], 2))
    for lo in range(0, pts.shape[0], _POINT_BLOCK):
        block = np.ascontiguousarray(pts[lo : lo + _POINT_BLOCK])
        out[lo : lo + block.shape[0]] = kernels.cosine_fractions(lam, block, threshold)
    return out


def classify_points(freqs: FrequencySet, pts, threshold: float = COS_THRESHOLD) -> np.ndarray:
    """Vectorized classification; returns an array of class labels."""
    if freqs.multiplicity == 0:
        raise EmptyEnsembleError("empty frequency set")
    pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
    frac = _fractions(freqs, pts, threshold)
    dens = density_threshold(freqs.dim)
    labels = np.full(pts.shape[0], REGULAR, dtype=object)
    labels[frac[:, 0] > dens] = POSITIVE
    labels[frac[:, 1] > dens] = NEGATIVE
    return labels


def classify_point(freqs: FrequencySet, x) -> str:
    return str(classify_points(freqs, x)[0])


@dataclass(frozen=True)
class SingularDecomposition:
    dim: int
    energy: int
    cubes_per_axis: int
    probes: int
    positive: frozenset
    negative: frozenset
    witnesses: dict = field(default_factory=dict, compare=False)

    @property
    def singular_count(self) -> int:
        return len(self.positive) + len(self.negative)

    @property
    def measB(self) -> float:
        return self.singular_count / self.cubes_per_axis**self.dim

    def classification(self, index: tuple) -> str:
        if index in self.positive:
            return POSITIVE
        if index in self.negative:
            return NEGATIVE
        return REGULAR

    def cube_index(self, x) -> tuple:
        x = np.asarray(x, dtype=np.float64)
        return tuple(int(i) % self.cubes_per_axis for i in np.floor(x * self.cubes_per_axis))

    def classify_location(self, x) -> str:
        return self.classification(self.cube_index(x))

    def cube_origin(self, index: tuple) -> np.ndarray:
        return np.asarray(index, dtype=np.float64) / self.cubes_per_axis

    def to_json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "energy": self.energy,
            "M": self.cubes_per_axis,
            "probes": self.probes,
            "counts": {
                POSITIVE: len(self.positive),
                NEGATIVE: len(self.negative),
                REGULAR: self.cubes_per_axis**self.dim - self.singular_count,
            },
            "measB": self.measB,
            "witnesses": {
                ",".join(map(str, k)): list(v) for k, v in sorted(self.witnesses.items())
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())


def _probe_offsets(dim: int, probes: int) -> np.ndarray:
    axis = (np.arange(probes) + 0.5) / probes
    grid = np.stack(
        [g.ravel() for g in np.meshgrid(*([axis] * dim), indexing="ij")], axis=1
    )
    center = np.full((1, dim), 0.5)
    return np.concatenate([grid, center], axis=0)


def classify_cubes(
    freqs: FrequencySet, cubes_per_axis: int | None = None, probes: int = 3
) -> SingularDecomposition:
    """Probe every cube at a probes-per-axis lattice plus its center.

    Finite probing under-detects: a cube is reported singular only when a
    singular probe was found, never proven regular.
    """
    if freqs.multiplicity == 0:
        raise EmptyEnsembleError("empty frequency set")
    m = default_cubes_per_axis(freqs) if cubes_per_axis is None else int(cubes_per_axis)
    if m < 1:
        raise DomainError(f"cubes_per_axis must be positive, got {m}")
    if probes < 1:
        raise DomainError(f"probes must be positive, got {probes}")
    d = freqs.dim
    total = m**d
    if total > _MAX_CUBES:
        raise CapacityError(f"{total} cubes exceeds enumeration cap {_MAX_CUBES}")
    offsets = _probe_offsets(d, probes)
    dens = density_threshold(d)
    positive: set = set()
    negative: set = set()
    witnesses: dict = {}
    cube_block = max(1, _POINT_BLOCK // offsets.shape[0])
    flat = np.arange(total, dtype=np.int64)
    for lo in range(0, total, cube_block):
        chunk = flat[lo : lo + cube_block]
        idx = np.stack(np.unravel_index(chunk, (m,) * d), axis=1).astype(np.float64)
        # (cubes, probes, d) -> flat probe list
        pts = ((idx[:, None, :] + offsets[None, :, :]) / m).reshape(-1, d)
        frac = _fractions(freqs, pts, COS_THRESHOLD).reshape(
            chunk.shape[0], offsets.shape[0], 2
        )
        pos_hit = frac[:, :, 0] > dens
        neg_hit = frac[:, :, 1] > dens
        for j in np.nonzero(pos_hit.any(axis=1))[0]:
            key = tuple(int(c) for c in idx[j])
            positive.add(key)
            witnesses[key] = tuple(
                (idx[j] + offsets[int(np.argmax(pos_hit[j]))]) / m
            )
        for j in np.nonzero(neg_hit.any(axis=1))[0]:
            key = tuple(int(c) for c in idx[j])
            if key in positive:
                raise PreconditionError(f"cube {key} probed both positive and negative")
            negative.add(key)
            witnesses[key] = tuple(
                (idx[j] + offsets[int(np.argmax(neg_hit[j]))]) / m
            )
    return SingularDecomposition(
        dim=d,
        energy=freqs.energy,
        cubes_per_axis=m,
        probes=probes,
        positive=frozenset(positive),
        negative=frozenset(negative),
        witnesses=witnesses,
    )


def certificate_holds(freqs: FrequencySet, x, kind: str) -> bool:
    """Relaxed-threshold witness check: more than a 1 - 1/(4d) fraction of
    the cosines beyond +-1/2 with the sign matching `kind`."""
    frac = _fractions(freqs, np.atleast_2d(np.asarray(x, dtype=np.float64)), CUBE_COS_THRESHOLD)[0]
    dens = density_threshold(freqs.dim)
    if kind == POSITIVE:
        return bool(frac[0] > dens)
    if kind == NEGATIVE:
        return bool(frac[1] > dens)
    raise DomainError(f"kind must be positive or negative, got {kind!r}")


def u_bounds_check(
    freqs: FrequencySet,
    decomposition: SingularDecomposition,
    samples: int,
    seed: int = 0,
) -> dict:
    """Sample uniform points and test the two-sided covariance bounds.

    Regular-cube points must satisfy |u| < 1 - 1/(16d); the bound is on
    points outside the true singular set, so a sample that breaks it is
    excused (and logged) when the point itself is singular, which only
    means finite probing missed its cube.  Singular-cube points with a
    verified certificate must satisfy |u| > 1/16.
    """
    d = freqs.dim
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    pts = rng.random((samples, d))
    u = np.asarray(ensemble.two_point(freqs, pts))
    regular_bound = 1.0 - 1.0 / (16.0 * d)
    frac = _fractions(freqs, pts, CUBE_COS_THRESHOLD)
    dens = density_threshold(d)
    labels = np.array([decomposition.classify_location(p) for p in pts], dtype=object)
    regular = labels == REGULAR
    violations = []
    missed = 0
    over = regular & (np.abs(u) >= regular_bound)
    for i in np.nonzero(over)[0]:
        if classify_point(freqs, pts[i]) == REGULAR:
            violations.append(
                {"point": pts[i].tolist(), "u": float(u[i]), "bound": regular_bound}
            )
        else:
            missed += 1
    certified_checked = 0
    for i in np.nonzero(~regular)[0]:
        kind = labels[i]
        col = 0 if kind == POSITIVE else 1
        if frac[i, col] > dens:
            certified_checked += 1
            if not abs(u[i]) > 1.0 / 16.0:
                violations.append(
                    {"point": pts[i].tolist(), "u": float(u[i]), "bound": 1.0 / 16.0}
                )
    return {
        "samples": samples,
        "regular_samples": int(np.count_nonzero(regular)),
        "regular_bound": regular_bound,
        "certified_singular_samples": certified_checked,
        "missed_singular_cubes": missed,
        "violations": violations,
        "ok": not violations,
    }


def hessian_definiteness(freqs: FrequencySet, x) -> dict:
    """Eigenvalue check of the covariance Hessian at a certified point.

    Positive certificates force max eigenvalue <= -pi^2 E / (2d);
    negative certificates force min eigenvalue >= +pi^2 E / (2d).
    """
    x = np.asarray(x, dtype=np.float64)
    d = freqs.dim
    if certificate_holds(freqs, x, POSITIVE):
        kind = POSITIVE
    elif certificate_holds(freqs, x, NEGATIVE):
        kind = NEGATIVE
    else:
        raise PreconditionError(
            "no singular-point certificate at the given point; Hessian bound not applicable"
        )
    hess = ensemble.two_point_hessian(freqs, x)
    eigs = np.linalg.eigvalsh(hess)
    bound = math.pi**2 * freqs.energy / (2.0 * d)
    if kind == POSITIVE:
        ok = bool(eigs[-1] <= -bound)
    else:
        ok = bool(eigs[0] >= bound)
    return {
        "kind": kind,
        "eigenvalues": eigs.tolist(),
        "bound": bound,
        "ok": ok,
    }


def _rect_inverse_distance_mass(ax0: float, ax1: float, ay0: float, ay1: float) -> float:
    """Integral of 1/sqrt(x^2 + y^2) over [ax0,ax1] x [ay0,ay1], a box with
    one corner at the origin through corner splitting."""

    def corner(a: float, b: float) -> float:
        if a <= 0.0 or b <= 0.0:
            return 0.0
        return a * math.asinh(b / a) + b * math.asinh(a / b)

    total = 0.0
    for sx, x in ((1.0, ax1), (-1.0, ax0)):
        for sy, y in ((1.0, ay1), (-1.0, ay0)):
            total += sx * sy * math.copysign(corner(abs(x), abs(y)), x * y)
    return total


def singular_cube_contribution(
    freqs: FrequencySet,
    cube: tuple,
    cubes_per_axis: int,
    grid: int = 32,
) -> dict:
    """Integral of (1 - u^2)^{-1/2} over one cube of side 1/M, d=2 only.

    When the cube holds points with u = +-1 the local model 1/(c0 r) is
    removed node-wise and its exact mass over the cube added back; the
    remainder goes through tensor Gauss-Legendre.  The report compares
    against the scale 1/(M^{d-1} sqrt(E)).
    """
    from . import moments

    if freqs.dim != 2:
        raise DomainError("cube contribution quadrature implemented for d=2 only")
    m = int(cubes_per_axis)
    lo = np.asarray(cube, dtype=np.float64) / m
    h = 1.0 / m
    nodes, weights = np.polynomial.legendre.leggauss(grid)
    nodes = 0.5 * (nodes + 1.0)  # map to [0, 1]
    weights = 0.5 * weights
    xs = lo[0] + h * nodes
    ys = lo[1] + h * nodes
    pts = np.stack(
        [np.repeat(xs, grid), np.tile(ys, grid)], axis=1
    )
    u = np.asarray(ensemble.two_point(freqs, pts)).reshape(grid, grid)
    c0 = moments.local_model_slope(freqs)
    sing_pts, _ = moments.singular_points(freqs)
    delta = lo[None, :] + 0.5 * h - sing_pts
    delta -= np.round(delta)
    inside = np.all(np.abs(delta) <= 0.5 * h + 1e-12, axis=1)
    integrand = 1.0 / np.sqrt(np.maximum(1.0 - u * u, 1e-300))
    analytic = 0.0
    for k in np.nonzero(inside)[0]:
        center = lo + 0.5 * h - delta[k]
        dx = pts[:, 0].reshape(grid, grid) - center[0]
        dy = pts[:, 1].reshape(grid, grid) - center[1]
        r = np.sqrt(dx * dx + dy * dy)
        integrand -= 1.0 / (c0 * r)
        analytic += (
            _rect_inverse_distance_mass(
                lo[0] - center[0], lo[0] + h - center[0], lo[1] - center[1], lo[1] + h - center[1]
            )
            / c0
        )
    value = float(h * h * weights @ integrand @ weights) + analytic
    comparator = 1.0 / (m ** (freqs.dim - 1) * math.sqrt(freqs.energy))
    return {
        "cube": tuple(int(c) for c in cube),
        "value": value,
        "comparator": comparator,
        "ratio": value / comparator,
        "singular_points_inside": int(np.count_nonzero(inside)),
        "grid": grid,
    }
