"""Compiled inner loops: batched Thomas sweeps and a five-point BiCGStab."""
from __future__ import annotations

import math

import numpy as np
from numba import njit

_EPS2 = np.finfo(np.float64).eps ** 2


@njit(cache=True)
def thomas_apply(lower, cp, inv, d):
    """In-place Thomas sweep on ``d`` of shape ``(n, m)`` using a stored factor."""
    n, m = d.shape
    for j in range(m):
        d[0, j] *= inv[0]
    for i in range(1, n):
        li = lower[i]
        vi = inv[i]
        for j in range(m):
            d[i, j] = (d[i, j] - li * d[i - 1, j]) * vi
    for i in range(n - 2, -1, -1):
        ci = cp[i]
        for j in range(m):
            d[i, j] -= ci * d[i + 1, j]


@njit(cache=True)
def apply5(x, out, my, mx, diag, cx, cy, px, py):
    """``out = (diag + 2cx + 2cy) x - cx (E + W) - cy (N + S)`` on flat arrays.

    Neighbours wrap on periodic axes and are zero past Dirichlet edges.
    """
    cc = diag + 2.0 * cx + 2.0 * cy
    for j in range(my):
        jm = j - 1
        jp = j + 1
        if py:
            if jm < 0:
                jm = my - 1
            if jp >= my:
                jp = 0
        row = j * mx
        for i in range(mx):
            im = i - 1
            ip = i + 1
            if px:
                if im < 0:
                    im = mx - 1
                if ip >= mx:
                    ip = 0
            s = cc * x[row + i]
            if im >= 0:
                s -= cx * x[row + im]
            if ip < mx:
                s -= cx * x[row + ip]
            if jm >= 0:
                s -= cy * x[jm * mx + i]
            if jp < my:
                s -= cy * x[jp * mx + i]
            out[row + i] = s


@njit(cache=True)
def _dot(a, b):
    s = 0.0
    for i in range(a.size):
        s += a[i] * b[i]
    return s


@njit(cache=True)
def bicgstab5(b, x, my, mx, diag, cx, cy, px, py, tol, max_iter, floor=0.0):
    """BiCGStab on the five-point operator of :func:`apply5`, in place on ``x``.

    Same recurrence, restart and stopping rules as ``linalg.bicgstab``.  With
    ``floor > 0`` the tolerance is raised to ``floor (||b|| + ||A|| ||x||)``
    whenever the true residual is recomputed, the level below which
    round-off in forming ``b - A x`` dominates.
    Returns ``(status, iterations, residual)``; status 0 converged, 1 hit
    ``max_iter``, 2 rho or (rhat, v) breakdown, 3 omega breakdown.
    """
    n = b.size
    r = np.empty(n)
    v = np.zeros(n)
    p = np.zeros(n)
    s = np.empty(n)
    t = np.empty(n)
    rhat = np.empty(n)
    apply5(x, r, my, mx, diag, cx, cy, px, py)
    for i in range(n):
        r[i] = b[i] - r[i]
    rnorm = math.sqrt(_dot(r, r))
    bnorm = math.sqrt(_dot(b, b))
    anorm = abs(diag + 2 * cx + 2 * cy) + 2 * abs(cx) + 2 * abs(cy)
    tol0 = tol
    tol = max(tol0, floor * (bnorm + anorm * math.sqrt(_dot(x, x))))
    it = 0
    while rnorm > tol:
        if it >= max_iter:
            return 1, it, rnorm
        for i in range(n):
            rhat[i] = r[i]
            v[i] = 0.0
            p[i] = 0.0
        rhat_norm = rnorm
        rho = 1.0
        alpha = 1.0
        omega = 1.0
        while it < max_iter:
            it += 1
            rho_new = _dot(rhat, r)
            if abs(rho_new) <= _EPS2 * rhat_norm * math.sqrt(_dot(r, r)):
                return 2, it, rnorm
            beta = (rho_new / rho) * (alpha / omega)
            rho = rho_new
            for i in range(n):
                p[i] = r[i] + beta * (p[i] - omega * v[i])
            apply5(p, v, my, mx, diag, cx, cy, px, py)
            rv = _dot(rhat, v)
            if abs(rv) <= _EPS2 * rhat_norm * math.sqrt(_dot(v, v)):
                return 2, it, rnorm
            alpha = rho / rv
            ss = 0.0
            for i in range(n):
                s[i] = r[i] - alpha * v[i]
                ss += s[i] * s[i]
            if math.sqrt(ss) <= tol:
                for i in range(n):
                    x[i] += alpha * p[i]
                break
            apply5(s, t, my, mx, diag, cx, cy, px, py)
            tt = _dot(t, t)
            ts = _dot(t, s)
            if tt == 0.0 or abs(ts) <= _EPS2 * math.sqrt(tt) * math.sqrt(ss):
                return 3, it, rnorm
            omega = ts / tt
            rr = 0.0
            for i in range(n):
                x[i] += alpha * p[i] + omega * s[i]
                r[i] = s[i] - omega * t[i]
                rr += r[i] * r[i]
            if math.sqrt(rr) <= tol:
                break
        apply5(x, r, my, mx, diag, cx, cy, px, py)
        for i in range(n):
            r[i] = b[i] - r[i]
        rnorm = math.sqrt(_dot(r, r))
        tol = max(tol0, floor * (bnorm + anorm * math.sqrt(_dot(x, x))))
    return 0, it, rnorm
