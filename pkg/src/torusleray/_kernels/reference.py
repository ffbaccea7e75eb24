"""Pure-numpy reference implementations of the hot kernels.

Signatures are shared with the numba backend (`jit.py`); the active backend
is chosen in `__init__.py` via the LERAY_NUMBA environment variable.

Conventions: `lam` is a float64 (m, d) array of frequency representatives
(one per +/- pair), `bc` a float64 (m, 2) array of (b, c) coefficients, and
a field value is  scale * sum_k [ b_k cos(2 pi <lam_k, x>) - c_k sin(...) ].
Grid arrays are indexed as F[i, j] = f(i/n, j/n).
"""

from __future__ import annotations

import numpy as np

TWO_PI = 2.0 * np.pi


def eval_points(lam, bc, scale, pts):
    phases = TWO_PI * (pts @ lam.T)
    return scale * (np.cos(phases) @ bc[:, 0] - np.sin(phases) @ bc[:, 1])


def eval_gradient(lam, bc, scale, pts):
    phases = TWO_PI * (pts @ lam.T)
    weights = -bc[:, 0] * np.sin(phases) - bc[:, 1] * np.cos(phases)
    return (TWO_PI * scale) * (weights @ lam)


def _row_coefficients(lam, bc, y):
    """Per-row cos/sin amplitudes of the 1-d polynomials t -> f(t, y)."""
    theta = TWO_PI * np.outer(lam[:, 1], y)
    ct, st = np.cos(theta), np.sin(theta)
    a = bc[:, 0, None] * ct - bc[:, 1, None] * st
    b = -(bc[:, 0, None] * st + bc[:, 1, None] * ct)
    return a, b


def eval_grid_2d(lam, bc, scale, n):
    x = np.arange(n) / n
    phi = TWO_PI * np.outer(x, lam[:, 0])
    cx, sx = np.cos(phi), np.sin(phi)
    a, b = _row_coefficients(lam, bc, x)
    return scale * (cx @ a + sx @ b)


def count_below_2d(lam, bc, scale, n, eps):
    """Number of midpoint-grid points with |f| < eps, column-blocked."""
    x = (np.arange(n) + 0.5) / n
    phi = TWO_PI * np.outer(x, lam[:, 0])
    cx, sx = np.cos(phi), np.sin(phi)
    a, b = _row_coefficients(lam, bc, x)
    threshold = eps / scale
    block = max(1, (1 << 22) // n)
    count = 0
    for j0 in range(0, n, block):
        j1 = min(n, j0 + block)
        f = cx @ a[:, j0:j1] + sx @ b[:, j0:j1]
        count += int(np.count_nonzero(np.abs(f) < threshold))
    return count


def u_grid_2d(lam, nfreq, n):
    """Two-point function on the vertex grid; `lam` holds one vector per
    +/- pair, `nfreq` is the full multiplicity."""
    x = np.arange(n) / n
    phi = TWO_PI * np.outer(x, lam[:, 0])
    theta = TWO_PI * np.outer(x, lam[:, 1])
    return (2.0 / nfreq) * (np.cos(phi) @ np.cos(theta).T - np.sin(phi) @ np.sin(theta).T)


def cosine_fractions(lam, pts, threshold):
    """Per point: fraction of frequencies with cos > threshold and with
    cos < -threshold; `lam` is the full (symmetric) set here."""
    phases = TWO_PI * (pts @ lam.T)
    cosv = np.cos(phases)
    pos = np.mean(cosv > threshold, axis=1)
    neg = np.mean(cosv < -threshold, axis=1)
    return np.stack([pos, neg], axis=1)


def _edge_cross(v0, v1):
    return v0 / (v0 - v1)


def _newton_project(lam, bc, scale, pts):
    """One Newton step toward the zero set along the gradient direction."""
    f = eval_points(lam, bc, scale, pts)
    g = eval_gradient(lam, bc, scale, pts)
    n2 = g[:, 0] ** 2 + g[:, 1] ** 2
    step = np.where(n2 > 0, f / np.maximum(n2, 1e-300), 0.0)
    return pts - step[:, None] * g


def surface_integral_2d(vals, lam, bc, scale):
    """Marching-squares nodal integral sum(segment length / |grad f|).

    Returns (value, segment_count, min_gradient_norm). `vals` must be free
    of exact zeros (caller nudges them).
    """
    n = vals.shape[0]
    h = 1.0 / n
    v00 = vals
    v10 = np.roll(vals, -1, axis=0)
    v01 = np.roll(vals, -1, axis=1)
    v11 = np.roll(np.roll(vals, -1, axis=0), -1, axis=1)
    pos = (v00 > 0).astype(np.int8) + (v10 > 0) + (v01 > 0) + (v11 > 0)
    cells = np.argwhere((pos > 0) & (pos < 4))

    seg_a: list[tuple[float, float]] = []
    seg_b: list[tuple[float, float]] = []
    centers: list[tuple[float, float]] = []
    ambiguous: list[tuple] = []
    for i, j in cells:
        a, b = v00[i, j], v10[i, j]
        c, d = v01[i, j], v11[i, j]
        x, y = i * h, j * h
        crossings = []
        if (a > 0) != (b > 0):  # bottom
            crossings.append(("b", (x + h * _edge_cross(a, b), y)))
        if (b > 0) != (d > 0):  # right
            crossings.append(("r", (x + h, y + h * _edge_cross(b, d))))
        if (c > 0) != (d > 0):  # top
            crossings.append(("t", (x + h * _edge_cross(c, d), y + h)))
        if (a > 0) != (c > 0):  # left
            crossings.append(("l", (x, y + h * _edge_cross(a, c))))
        if len(crossings) == 2:
            seg_a.append(crossings[0][1])
            seg_b.append(crossings[1][1])
        elif len(crossings) == 4:
            centers.append((x + 0.5 * h, y + 0.5 * h))
            ambiguous.append((a, dict(crossings)))

    if centers:
        fc = eval_points(lam, bc, scale, np.asarray(centers))
        for (a, cr), fcv in zip(ambiguous, fc):
            if (fcv > 0) == (a > 0):
                # corner regions v10 and v01 are each cut off
                seg_a.extend([cr["b"], cr["t"]])
                seg_b.extend([cr["r"], cr["l"]])
            else:
                seg_a.extend([cr["b"], cr["r"]])
                seg_b.extend([cr["l"], cr["t"]])

    if not seg_a:
        return 0.0, 0, np.inf
    pa = _newton_project(lam, bc, scale, np.asarray(seg_a))
    pb = _newton_project(lam, bc, scale, np.asarray(seg_b))
    mid = _newton_project(lam, bc, scale, 0.5 * (pa + pb))
    lengths = np.hypot(pb[:, 0] - pa[:, 0], pb[:, 1] - pa[:, 1])
    # parabolic arc correction from the sagitta of the projected midpoint
    sag2 = np.sum((mid - 0.5 * (pa + pb)) ** 2, axis=1)
    keep = lengths > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        arcs = lengths * (1.0 + (8.0 / 3.0) * sag2 / lengths**2)
    na = np.hypot(*eval_gradient(lam, bc, scale, pa).T)
    nb = np.hypot(*eval_gradient(lam, bc, scale, pb).T)
    nm = np.hypot(*eval_gradient(lam, bc, scale, mid).T)
    inv_speed = (1.0 / na + 4.0 / nm + 1.0 / nb) / 6.0
    value = float(np.sum(arcs[keep] * inv_speed[keep]))
    min_grad = float(nm[keep].min()) if np.any(keep) else np.inf
    return value, int(np.count_nonzero(keep)), min_grad
