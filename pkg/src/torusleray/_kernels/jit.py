"""Numba-compiled implementations of the hot kernels.

Same contracts as `reference.py`; see that module for conventions.
"""

from __future__ import annotations

import numpy as np
from numba import njit

TWO_PI = 2.0 * np.pi


@njit(cache=True)
def eval_points(lam, bc, scale, pts):
    npts, d = pts.shape
    m = lam.shape[0]
    out = np.empty(npts)
    for i in range(npts):
        acc = 0.0
        for k in range(m):
            theta = 0.0
            for a in range(d):
                theta += lam[k, a] * pts[i, a]
            theta *= TWO_PI
            acc += bc[k, 0] * np.cos(theta) - bc[k, 1] * np.sin(theta)
        out[i] = scale * acc
    return out


@njit(cache=True)
def eval_gradient(lam, bc, scale, pts):
    npts, d = pts.shape
    m = lam.shape[0]
    out = np.zeros((npts, d))
    for i in range(npts):
        for k in range(m):
            theta = 0.0
            for a in range(d):
                theta += lam[k, a] * pts[i, a]
            theta *= TWO_PI
            w = -bc[k, 0] * np.sin(theta) - bc[k, 1] * np.cos(theta)
            for a in range(d):
                out[i, a] += w * lam[k, a]
    for i in range(npts):
        for a in range(d):
            out[i, a] *= TWO_PI * scale
    return out


@njit(cache=True)
def _row_coefficients(lam, bc, y):
    m = lam.shape[0]
    n = y.shape[0]
    a = np.empty((m, n))
    b = np.empty((m, n))
    for k in range(m):
        for j in range(n):
            theta = TWO_PI * lam[k, 1] * y[j]
            ct, st = np.cos(theta), np.sin(theta)
            a[k, j] = bc[k, 0] * ct - bc[k, 1] * st
            b[k, j] = -(bc[k, 0] * st + bc[k, 1] * ct)
    return a, b


@njit(cache=True)
def _x_basis(lam, x):
    m = lam.shape[0]
    n = x.shape[0]
    cx = np.empty((n, m))
    sx = np.empty((n, m))
    for i in range(n):
        for k in range(m):
            phi = TWO_PI * lam[k, 0] * x[i]
            cx[i, k] = np.cos(phi)
            sx[i, k] = np.sin(phi)
    return cx, sx


@njit(cache=True)
def eval_grid_2d(lam, bc, scale, n):
    x = np.arange(n) / n
    cx, sx = _x_basis(lam, x)
    a, b = _row_coefficients(lam, bc, x)
    return scale * (np.dot(cx, a) + np.dot(sx, b))


@njit(cache=True)
def count_below_2d(lam, bc, scale, n, eps):
    x = (np.arange(n) + 0.5) / n
    cx, sx = _x_basis(lam, x)
    a, b = _row_coefficients(lam, bc, x)
    threshold = eps / scale
    block = max(1, (1 << 22) // n)
    count = 0
    for j0 in range(0, n, block):
        j1 = min(n, j0 + block)
        f = np.dot(cx, a[:, j0:j1]) + np.dot(sx, b[:, j0:j1])
        for i in range(n):
            for j in range(j1 - j0):
                if abs(f[i, j]) < threshold:
                    count += 1
    return count


@njit(cache=True)
def u_grid_2d(lam, nfreq, n):
    x = np.arange(n) / n
    m = lam.shape[0]
    cx = np.empty((n, m))
    sx = np.empty((n, m))
    cy = np.empty((m, n))
    sy = np.empty((m, n))
    for i in range(n):
        for k in range(m):
            phi = TWO_PI * lam[k, 0] * x[i]
            theta = TWO_PI * lam[k, 1] * x[i]
            cx[i, k] = np.cos(phi)
            sx[i, k] = np.sin(phi)
            cy[k, i] = np.cos(theta)
            sy[k, i] = np.sin(theta)
    return (2.0 / nfreq) * (np.dot(cx, cy) - np.dot(sx, sy))


@njit(cache=True)
def cosine_fractions(lam, pts, threshold):
    npts, d = pts.shape
    m = lam.shape[0]
    out = np.empty((npts, 2))
    for i in range(npts):
        pos = 0
        neg = 0
        for k in range(m):
            theta = 0.0
            for a in range(d):
                theta += lam[k, a] * pts[i, a]
            c = np.cos(TWO_PI * theta)
            if c > threshold:
                pos += 1
            elif c < -threshold:
                neg += 1
        out[i, 0] = pos / m
        out[i, 1] = neg / m
    return out


@njit(cache=True, inline="always")
def _field_and_grad(lam, bc, scale, x, y):
    m = lam.shape[0]
    f = 0.0
    gx = 0.0
    gy = 0.0
    for k in range(m):
        theta = TWO_PI * (lam[k, 0] * x + lam[k, 1] * y)
        ct, st = np.cos(theta), np.sin(theta)
        f += bc[k, 0] * ct - bc[k, 1] * st
        w = -bc[k, 0] * st - bc[k, 1] * ct
        gx += w * lam[k, 0]
        gy += w * lam[k, 1]
    return scale * f, TWO_PI * scale * gx, TWO_PI * scale * gy


@njit(cache=True)
def _newton_project(lam, bc, scale, x, y):
    """One Newton step toward the zero set along the gradient direction."""
    f, gx, gy = _field_and_grad(lam, bc, scale, x, y)
    n2 = gx * gx + gy * gy
    if n2 > 0.0:
        x -= f * gx / n2
        y -= f * gy / n2
    return x, y


@njit(cache=True)
def surface_integral_2d(vals, lam, bc, scale):
    n = vals.shape[0]
    h = 1.0 / n
    total = 0.0
    nseg = 0
    min_grad = np.inf
    ex = np.empty(4)
    ey = np.empty(4)
    for i in range(n):
        ip = (i + 1) % n
        x = i * h
        for j in range(n):
            jp = (j + 1) % n
            a = vals[i, j]
            b = vals[ip, j]
            c = vals[i, jp]
            d = vals[ip, jp]
            sa, sb, sc, sd = a > 0, b > 0, c > 0, d > 0
            if sa == sb and sb == sc and sc == sd:
                continue
            y = j * h
            ncr = 0
            # edge order: bottom, right, top, left
            if sa != sb:
                ex[ncr] = x + h * (a / (a - b))
                ey[ncr] = y
                ncr += 1
            if sb != sd:
                ex[ncr] = x + h
                ey[ncr] = y + h * (b / (b - d))
                ncr += 1
            if sc != sd:
                ex[ncr] = x + h * (c / (c - d))
                ey[ncr] = y + h
                ncr += 1
            if sa != sc:
                ex[ncr] = x
                ey[ncr] = y + h * (a / (a - c))
                ncr += 1
            if ncr == 2:
                pairs = ((0, 1), (-1, -1))
            else:
                fc, _, _ = _field_and_grad(lam, bc, scale, x + 0.5 * h, y + 0.5 * h)
                if (fc > 0) == sa:
                    # crossings are (bottom, right, top, left); isolate b and c
                    pairs = ((0, 1), (2, 3))
                else:
                    pairs = ((0, 3), (1, 2))
            for p0, p1 in pairs:
                if p0 < 0:
                    continue
                ax, ay = _newton_project(lam, bc, scale, ex[p0], ey[p0])
                bx, by = _newton_project(lam, bc, scale, ex[p1], ey[p1])
                dx = bx - ax
                dy = by - ay
                length = np.sqrt(dx * dx + dy * dy)
                if length == 0.0:
                    continue
                mx0 = 0.5 * (ax + bx)
                my0 = 0.5 * (ay + by)
                mx, my = _newton_project(lam, bc, scale, mx0, my0)
                sag2 = (mx - mx0) ** 2 + (my - my0) ** 2
                # parabolic arc correction from the midpoint sagitta
                arc = length * (1.0 + (8.0 / 3.0) * sag2 / (length * length))
                _, gx, gy = _field_and_grad(lam, bc, scale, ax, ay)
                na = np.sqrt(gx * gx + gy * gy)
                _, gx, gy = _field_and_grad(lam, bc, scale, bx, by)
                nb = np.sqrt(gx * gx + gy * gy)
                _, gx, gy = _field_and_grad(lam, bc, scale, mx, my)
                nm = np.sqrt(gx * gx + gy * gy)
                if nm < min_grad:
                    min_grad = nm
                total += arc * (1.0 / na + 4.0 / nm + 1.0 / nb) / 6.0
                nseg += 1
    return total, nseg, min_grad
