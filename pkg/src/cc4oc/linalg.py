"""Tridiagonal, cyclic tridiagonal and matrix-free BiCGStab solvers."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._kernels import thomas_apply

_PIVOT_RTOL = 1e-14
_BREAKDOWN_TOL = np.finfo(float).eps ** 2


class SingularSystemError(ArithmeticError):
    pass


class BreakdownError(ArithmeticError):
    pass


class ConvergenceError(ArithmeticError):
    """An iteration hit its cap.  ``x`` holds the last iterate."""

    def __init__(self, msg, x=None, stats=None):
        super().__init__(msg)
        self.x = x
        self.stats = stats


@dataclass
class TridiagonalSystem:
    """``lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]``.

    ``lower[0]`` and ``upper[n-1]`` are ignored.
    """

    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        self.lower = np.asarray(self.lower, dtype=float)
        self.diag = np.asarray(self.diag, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        self.rhs = np.asarray(self.rhs, dtype=float)
        n = self.diag.shape[0]
        if n < 2:
            raise ValueError("tridiagonal system needs n >= 2")
        if self.lower.shape[0] != n or self.upper.shape[0] != n or self.rhs.shape[0] != n:
            raise ValueError("band and rhs lengths must all equal n")

    @property
    def n(self) -> int:
        return self.diag.shape[0]

    def dense(self) -> np.ndarray:
        n = self.n
        a = np.diag(self.diag)
        a[np.arange(1, n), np.arange(n - 1)] = self.lower[1:]
        a[np.arange(n - 1), np.arange(1, n)] = self.upper[:-1]
        return a


class TridiagonalFactor:
    """Thomas elimination of a fixed tridiagonal matrix, reusable across rhs.

    ``solve`` accepts a right-hand side of shape ``(n,)`` or ``(n, m)``; the
    second axis batches ``m`` independent systems sharing the matrix.
    """

    def __init__(self, lower, diag, upper):
        lower = np.asarray(lower, dtype=float)
        diag = np.asarray(diag, dtype=float)
        upper = np.asarray(upper, dtype=float)
        n = diag.shape[0]
        scale = max(float(np.max(np.abs(diag))), np.finfo(float).tiny)
        cp = np.zeros(n)
        inv = np.zeros(n)
        pivot = diag[0]
        for i in range(n):
            if i > 0:
                pivot = diag[i] - lower[i] * cp[i - 1]
            if abs(pivot) < _PIVOT_RTOL * scale:
                raise SingularSystemError(f"zero pivot at row {i} ({pivot:.3e})")
            inv[i] = 1.0 / pivot
            if i < n - 1:
                cp[i] = upper[i] * inv[i]
        self.n = n
        self._lower = lower
        self._cp = cp
        self._inv = inv

    def solve(self, rhs) -> np.ndarray:
        d = np.array(rhs, dtype=float)
        if d.shape[0] != self.n:
            raise ValueError(f"rhs has {d.shape[0]} rows, system has {self.n}")
        d2 = d.reshape(self.n, -1)
        if not d2.flags.c_contiguous:
            d2 = np.ascontiguousarray(d2)
        thomas_apply(self._lower, self._cp, self._inv, d2)
        return d2.reshape(d.shape)


class CyclicTridiagonalFactor:
    """Tridiagonal matrix plus the two corner entries of a periodic line.

    ``corner_lower`` is ``A[n-1, 0]`` and ``corner_upper`` is ``A[0, n-1]``.
    The Sherman-Morrison correction needs two solves with the perturbed
    tridiagonal matrix; the one against the rank-one vector is done here.
    """

    def __init__(self, lower, diag, upper, corner_lower, corner_upper):
        diag = np.array(diag, dtype=float)
        n = diag.shape[0]
        if n < 3:
            raise ValueError("cyclic system needs n >= 3")
        gamma = -diag[0] if diag[0] != 0 else -1.0
        alpha, beta = float(corner_lower), float(corner_upper)
        bb = diag.copy()
        bb[0] -= gamma
        bb[-1] -= alpha * beta / gamma
        self._tri = TridiagonalFactor(lower, bb, upper)
        u = np.zeros(n)
        u[0], u[-1] = gamma, alpha
        z = self._tri.solve(u)
        denom = 1.0 + z[0] + beta * z[-1] / gamma
        if abs(denom) < _PIVOT_RTOL * max(1.0, float(np.max(np.abs(z)))):
            raise SingularSystemError("cyclic system is singular")
        self.n = n
        self._z = z
        self._beta_over_gamma = beta / gamma
        self._denom = denom

    def solve(self, rhs) -> np.ndarray:
        y = self._tri.solve(rhs)
        fact = (y[0] + self._beta_over_gamma * y[-1]) / self._denom
        if y.ndim == 1:
            return y - fact * self._z
        return y - self._z[:, None] * fact[None, :]


def solve_tridiagonal(sys: TridiagonalSystem) -> np.ndarray:
    """Thomas algorithm without pivoting."""
    return TridiagonalFactor(sys.lower, sys.diag, sys.upper).solve(sys.rhs)


def solve_cyclic_tridiagonal(sys: TridiagonalSystem, corner_lower: float,
                             corner_upper: float) -> np.ndarray:
    """Solve the periodic system whose matrix is ``sys`` plus the corners
    ``A[n-1, 0] = corner_lower`` and ``A[0, n-1] = corner_upper``."""
    if corner_lower == 0.0 and corner_upper == 0.0:
        return solve_tridiagonal(sys)
    f = CyclicTridiagonalFactor(sys.lower, sys.diag, sys.upper,
                                corner_lower, corner_upper)
    return f.solve(sys.rhs)


# -- Krylov ------------------------------------------------------------------

@dataclass
class LinearOperator:
    apply: Callable[[np.ndarray], np.ndarray]
    dim: int

    def __call__(self, x):
        return self.apply(x)


@dataclass
class IterStats:
    iterations: int
    final_residual_norm: float
    converged: bool


def bicgstab(op: LinearOperator, rhs, x0=None, tol: float = 1e-10,
             max_iter: int = 1000) -> tuple[np.ndarray, IterStats]:
    """Unpreconditioned BiCGStab with an absolute residual criterion.

    Stops once ``||op(x) - rhs||_2 <= tol``.  The recurrence residual is
    checked against a recomputed one before returning; if they disagree the
    iteration restarts from the current iterate.

    Raises
    ------
    BreakdownError
        If ``rho``, ``(rhat, v)`` or ``omega`` vanishes relative to the vectors it is
        formed from.
    ConvergenceError
        After ``max_iter`` iterations; ``err.x`` is the last iterate.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    b = np.asarray(rhs, dtype=float)
    if b.shape != (op.dim,):
        raise ValueError(f"rhs shape {b.shape} does not match operator dim {op.dim}")
    x = np.zeros(op.dim) if x0 is None else np.array(x0, dtype=float)

    r = b - op(x)
    rnorm = math.sqrt(np.dot(r, r))
    it = 0
    while rnorm > tol:
        if it >= max_iter:
            raise ConvergenceError(
                f"BiCGStab did not reach {tol:.1e} in {max_iter} iterations "
                f"(residual {rnorm:.3e})", x, IterStats(it, rnorm, False))
        # (re)start
        rhat = r.copy()
        rhat_norm = rnorm
        rho = alpha = omega = 1.0
        v = np.zeros_like(x)
        p = np.zeros_like(x)
        while it < max_iter:
            it += 1
            rho_new = np.dot(rhat, r)
            if abs(rho_new) <= _BREAKDOWN_TOL * rhat_norm * math.sqrt(np.dot(r, r)):
                raise BreakdownError(f"rho vanished at iteration {it}")
            beta = (rho_new / rho) * (alpha / omega)
            rho = rho_new
            p = r + beta * (p - omega * v)
            v = op(p)
            rv = np.dot(rhat, v)
            if abs(rv) <= _BREAKDOWN_TOL * rhat_norm * math.sqrt(np.dot(v, v)):
                raise BreakdownError(f"(rhat, v) vanished at iteration {it}")
            alpha = rho / rv
            s = r - alpha * v
            snorm = math.sqrt(np.dot(s, s))
            if snorm <= tol:
                x = x + alpha * p
                r = s
                break
            t = op(s)
            tt = np.dot(t, t)
            ts = np.dot(t, s)
            if tt == 0.0 or abs(ts) <= _BREAKDOWN_TOL * math.sqrt(tt) * snorm:
                raise BreakdownError(f"omega vanished at iteration {it}")
            omega = ts / tt
            x = x + alpha * p + omega * s
            r = s - omega * t
            if math.sqrt(np.dot(r, r)) <= tol:
                break
        r = b - op(x)
        rnorm = math.sqrt(np.dot(r, r))
    return x, IterStats(it, rnorm, True)
