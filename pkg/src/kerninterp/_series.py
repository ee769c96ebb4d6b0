"""Low-level evaluators for weighted ultraspherical series.

Everything here works on the ratio-normalized family R_n(t) defined by
R_0 = 1, R_1 = t, and

    R_n = (2(n+lam-1) t R_{n-1} - (n-1) R_{n-2}) / (n + 2 lam - 1),

with lam = (d-1)/2, so that R_n(1) = 1 for every degree. The normalized
polynomials used elsewhere in the package are C~_n = d_n R_n with d_n the
harmonic-space dimension; callers fold the d_n factors into the weight
vectors they pass down. Keeping the recurrence on R_n avoids overflow at
high degree in higher dimensions.

Hot loops are compiled with numba when it is importable; a vectorized
numpy fallback produces identical values (same operation order per mode).
"""
from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap


# Flipped off only in tests that compare the two backends.
USE_NUMBA = HAVE_NUMBA

_BLOCK = 16384


@njit(cache=True)
def _series_block(weights, lam, t, out):
    """out[b] = sum_n weights[n] * R_n(t[b]) for one block of arguments."""
    N = weights.shape[0] - 1
    B = t.shape[0]
    r_prev = np.empty(B)
    r = np.empty(B)
    for b in range(B):
        r_prev[b] = 1.0
        r[b] = t[b]
        out[b] = weights[0]
    if N >= 1:
        for b in range(B):
            out[b] += weights[1] * t[b]
    for n in range(2, N + 1):
        c1 = 2.0 * (n + lam - 1.0) / (n + 2.0 * lam - 1.0)
        c2 = (n - 1.0) / (n + 2.0 * lam - 1.0)
        for b in range(B):
            rn = c1 * t[b] * r[b] - c2 * r_prev[b]
            r_prev[b] = r[b]
            r[b] = rn
            out[b] += weights[n] * rn
    return out


@njit(cache=True)
def _translate_block(points, centers, alphas, weights, lam, out):
    """out[q] = sum_y alphas[y] * sum_n weights[n] R_n(points[q] . centers[y])."""
    N = weights.shape[0] - 1
    Q = points.shape[0]
    P = centers.shape[0]
    m = points.shape[1]
    t = np.empty(Q)
    vals = np.empty(Q)
    for q in range(Q):
        out[q] = 0.0
    for p in range(P):
        for q in range(Q):
            acc = 0.0
            for j in range(m):
                acc += points[q, j] * centers[p, j]
            if acc > 1.0:
                acc = 1.0
            elif acc < -1.0:
                acc = -1.0
            t[q] = acc
        _series_block(weights, lam, t, vals)
        a = alphas[p]
        for q in range(Q):
            out[q] += a * vals[q]
    return out


def _series_numpy(weights: np.ndarray, lam: float, t: np.ndarray) -> np.ndarray:
    N = weights.shape[0] - 1
    out = np.full(t.shape, weights[0])
    if N == 0:
        return out
    r_prev = np.ones_like(t)
    r = t.copy()
    out += weights[1] * t
    for n in range(2, N + 1):
        c1 = 2.0 * (n + lam - 1.0) / (n + 2.0 * lam - 1.0)
        c2 = (n - 1.0) / (n + 2.0 * lam - 1.0)
        rn = c1 * t * r - c2 * r_prev
        r_prev = r
        r = rn
        out += weights[n] * rn
    return out


def series_sum(weights: np.ndarray, lam: float, t: np.ndarray) -> np.ndarray:
    """Evaluate sum_n weights[n] R_n(t) elementwise over an array t."""
    weights = np.ascontiguousarray(weights, dtype=float)
    t_arr = np.asarray(t, dtype=float)
    if not USE_NUMBA:
        return _series_numpy(weights, lam, t_arr)
    flat = np.ascontiguousarray(t_arr.ravel())
    out = np.empty_like(flat)
    for lo in range(0, flat.size, _BLOCK):
        hi = min(lo + _BLOCK, flat.size)
        _series_block(weights, lam, flat[lo:hi], out[lo:hi])
    return out.reshape(t_arr.shape)


def translate_sum(
    points: np.ndarray,
    centers: np.ndarray,
    alphas: np.ndarray,
    weights: np.ndarray,
    lam: float,
) -> np.ndarray:
    """Weighted sum of zonal series translates, evaluated at many points.

    Computes out[q] = sum_p alphas[p] * sum_n weights[n] R_n(x_q . y_p)
    with the dots clamped to [-1, 1]. This is the workhorse behind both
    interpolant evaluation and pseudodifferential images on the sphere.
    """
    points = np.ascontiguousarray(points, dtype=float)
    centers = np.ascontiguousarray(centers, dtype=float)
    alphas = np.ascontiguousarray(alphas, dtype=float)
    weights = np.ascontiguousarray(weights, dtype=float)
    out = np.empty(points.shape[0])
    if USE_NUMBA:
        for lo in range(0, points.shape[0], _BLOCK):
            hi = min(lo + _BLOCK, points.shape[0])
            _translate_block(points[lo:hi], centers, alphas, weights, lam, out[lo:hi])
        return out
    N = weights.shape[0] - 1
    for lo in range(0, points.shape[0], 8192):
        hi = min(lo + 8192, points.shape[0])
        t = np.clip(points[lo:hi] @ centers.T, -1.0, 1.0)
        acc = weights[0] * np.sum(alphas) * np.ones(hi - lo)
        if N >= 1:
            r_prev = np.ones_like(t)
            r = t
            acc += weights[1] * (t @ alphas)
            for n in range(2, N + 1):
                c1 = 2.0 * (n + lam - 1.0) / (n + 2.0 * lam - 1.0)
                c2 = (n - 1.0) / (n + 2.0 * lam - 1.0)
                rn = c1 * t * r - c2 * r_prev
                r_prev = r
                r = rn
                acc += weights[n] * (rn @ alphas)
        out[lo:hi] = acc
    return out


def mode_quadratic_forms(
    dots: np.ndarray, alphas: np.ndarray, lam: float, n_max: int
) -> np.ndarray:
    """q[n] = alpha^T R_n(dots) alpha for every degree n <= n_max.

    `dots` is the matrix of pairwise inner products of the centers
    (clamped), applied elementwise. One forward recurrence over the whole
    matrix gives all degrees in O(n_max |Y|^2).
    """
    T = np.clip(np.asarray(dots, dtype=float), -1.0, 1.0)
    a = np.asarray(alphas, dtype=float)
    q = np.empty(n_max + 1)
    s = float(np.sum(a))
    q[0] = s * s
    if n_max == 0:
        return q
    r_prev = np.ones_like(T)
    r = T
    q[1] = float(a @ (T @ a))
    for n in range(2, n_max + 1):
        c1 = 2.0 * (n + lam - 1.0) / (n + 2.0 * lam - 1.0)
        c2 = (n - 1.0) / (n + 2.0 * lam - 1.0)
        rn = c1 * T * r - c2 * r_prev
        r_prev = r
        r = rn
        q[n] = float(a @ (rn @ a))
    return q


def mode_translate_weights(
    dots: np.ndarray, alphas: np.ndarray, lam: float, n_max: int
) -> np.ndarray:
    """w[n] = sum_p alphas[p] R_n(dots[p]) for every degree n <= n_max.

    `dots` holds the inner products of the centers with one fixed pole.
    """
    t = np.clip(np.asarray(dots, dtype=float), -1.0, 1.0)
    a = np.asarray(alphas, dtype=float)
    w = np.empty(n_max + 1)
    w[0] = float(np.sum(a))
    if n_max == 0:
        return w
    r_prev = np.ones_like(t)
    r = t
    w[1] = float(t @ a)
    for n in range(2, n_max + 1):
        c1 = 2.0 * (n + lam - 1.0) / (n + 2.0 * lam - 1.0)
        c2 = (n - 1.0) / (n + 2.0 * lam - 1.0)
        rn = c1 * t * r - c2 * r_prev
        r_prev = r
        r = rn
        w[n] = float(rn @ a)
    return w
