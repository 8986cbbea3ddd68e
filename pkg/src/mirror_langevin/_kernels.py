"""Compiled inner loops for the barrier maps.

The diffusion phase of the sampler evaluates the inverse gradient map and
the Hessian factor once per Euler-Maruyama substep, sequentially, so these
loops dominate the cost of long chains.  Every kernel here has a plain numpy
counterpart in :mod:`mirror_langevin.mirror` that the tests compare against.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _scale_root(y, a, a0, tol, max_iter):
    # g(c) = sum a_i / (c - y_i) + a0 / c is decreasing from +inf to 0 on
    # (max(0, max y), inf) and g(c) <= sum(a) / (c - lo).
    d = y.shape[0]
    lo = 0.0
    total = a0
    for i in range(d):
        if y[i] > lo:
            lo = y[i]
        total += a[i]
    hi = lo + total
    c = hi
    for _ in range(max_iter):
        g = a0 / c
        dg = -a0 / (c * c)
        for i in range(d):
            r = 1.0 / (c - y[i])
            g += a[i] * r
            dg -= a[i] * r * r
        f = g - 1.0
        if f > 0.0:
            lo = c
        else:
            hi = c
        newton = c + (1.0 / g - 1.0) * g * g / dg
        inside = newton > lo and newton < hi
        if abs(f) <= tol or hi - lo <= 4e-16 * hi:
            if inside:
                return newton, True
            return c, True
        if inside:
            c = newton
        else:
            c = 0.5 * (lo + hi)
    return c, False


@njit(cache=True, nogil=True)
def simplex_scale(y, a, a0, tol, max_iter):
    """Row-wise root ``c`` for a 2-D array of dual points; returns ``(c, ok)``."""
    m = y.shape[0]
    out = np.empty(m)
    ok = True
    for b in range(m):
        c, good = _scale_root(y[b], a, a0, tol, max_iter)
        out[b] = c
        ok = ok and good
    return out, ok


@njit(cache=True, nogil=True)
def box_dual_em(w, h, xi):
    """Euler-Maruyama substeps of the dual diffusion for the box barrier.

    ``w`` has shape ``(m, d)`` and is updated in place; ``xi`` has shape
    ``(k, m, d)``.
    """
    k, m, d = xi.shape
    root = math.sqrt(2.0 * h)
    for j in range(k):
        for b in range(m):
            for i in range(d):
                y = w[b, i]
                x = y / (1.0 + math.sqrt(1.0 + y * y))
                hd = 1.0 / ((1.0 - x) * (1.0 - x)) + 1.0 / ((1.0 + x) * (1.0 + x))
                w[b, i] = y + root * math.sqrt(hd) * xi[j, b, i]
    return w


@njit(cache=True, nogil=True)
def simplex_dual_em(w, h, xi, a, a0, tol, max_iter):
    """Euler-Maruyama substeps for the (weighted) simplex barrier.

    The Hessian at ``x = grad*(w)`` is ``diag((c - w_i)^2 / a_i) + (c^2 / a0) 11^T``
    with ``c`` the scalar root, and is applied through the O(d) factor
    ``D^{1/2} (I + g u u^T)``.  Returns ``ok=False`` if a root find fails.
    """
    k, m, d = xi.shape
    root = math.sqrt(2.0 * h)
    sd = np.empty(d)
    u = np.empty(d)
    for j in range(k):
        for b in range(m):
            c, good = _scale_root(w[b], a, a0, tol, max_iter)
            if not good:
                return w, False
            sqrt_scale = c / math.sqrt(a0)
            q = 0.0
            dot = 0.0
            for i in range(d):
                sd[i] = (c - w[b, i]) / math.sqrt(a[i])
                u[i] = sqrt_scale / sd[i]
                q += u[i] * u[i]
                dot += u[i] * xi[j, b, i]
            g = 1.0 / (1.0 + math.sqrt(1.0 + q))
            for i in range(d):
                w[b, i] += root * sd[i] * (xi[j, b, i] + g * u[i] * dot)
    return w, True
