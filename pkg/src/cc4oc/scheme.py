"""The (5,5) constant-coefficient fourth-order compact scheme.

Second derivatives are replaced by ``2 delta_xx phi - delta_x phi_x`` (and the
same in ``y``), with ``phi_x``, ``phi_y`` carried as Pade unknowns.  The
resulting five-point operator in ``phi`` has constant coefficients whatever
the convection field, so each time level needs one constant, diagonally
dominant banded solve plus tridiagonal Pade solves, iterated until the lagged
derivative fields stop changing.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .grid import BoundarySpec, FieldFunction, ScalarField, UniformGrid2D
from ._kernels import apply5, bicgstab5
from .linalg import BreakdownError, ConvergenceError, IterStats, LinearOperator
from .pade import DerivativeClosure, closure_from_bc, dx_array, dy_array

_ROUNDOFF_FLOOR = 32 * np.finfo(float).eps


class StabilityWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SchemeConfig:
    """Time-stepping and solver parameters.

    ``iota`` blends the two time levels: 0 is forward Euler, 0.5
    Crank-Nicolson, 1 backward Euler.  Only ``0.5 <= iota <= 1`` is
    unconditionally stable.
    """

    a: float = 1.0
    iota: float = 0.5
    dt: float = 1e-3
    inner_tol: float = 1e-12
    linear_tol: float = 1e-10
    max_inner: int = 100
    max_linear: int = 10000
    linear_rtol: float = 0.0

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("time coefficient a must be positive")
        if not 0.0 <= self.iota <= 1.0:
            raise ValueError("iota must lie in [0, 1]")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.inner_tol <= 0 or self.linear_tol <= 0:
            raise ValueError("tolerances must be positive")
        if not 0.0 <= self.linear_rtol < 1.0:
            raise ValueError("linear_rtol must lie in [0, 1)")
        if self.iota < 0.5:
            warnings.warn(f"iota = {self.iota} < 0.5: the scheme is only "
                          "conditionally stable", StabilityWarning, stacklevel=3)

    @property
    def unconditionally_stable(self) -> bool:
        return 0.5 <= self.iota <= 1.0


def _zero(x, y, t):
    return 0.0


@dataclass(frozen=True)
class Coefficients:
    """Convection coefficients ``c``, ``d`` and source ``s``, all of ``(x, y, t)``."""

    c: FieldFunction = _zero
    d: FieldFunction = _zero
    s: FieldFunction = _zero

    def sample(self, grid: UniformGrid2D, t: float):
        X, Y = grid.mesh()
        return tuple(np.broadcast_to(np.asarray(f(X, Y, t), dtype=float), grid.shape)
                     for f in (self.c, self.d, self.s))


@dataclass(frozen=True)
class TransportState:
    phi: ScalarField
    phi_x: ScalarField
    phi_y: ScalarField
    t: float = 0.0

    @property
    def grid(self) -> UniformGrid2D:
        return self.phi.grid

    @classmethod
    def from_phi(cls, phi: ScalarField, bc: BoundarySpec, t: float = 0.0) -> "TransportState":
        """State whose derivative fields are the Pade derivatives of ``phi``."""
        g = phi.grid
        cx, cy = closure_from_bc(bc, "x"), closure_from_bc(bc, "y")
        return cls(phi, ScalarField(g, dx_array(phi.values, g, cx, t)),
                   ScalarField(g, dy_array(phi.values, g, cy, t)), t)


# -- stencil machinery -------------------------------------------------------

class Stencil:
    """Five-point difference operators on a grid with optional periodic axes.

    Arrays are full ``(ny, nx)`` node arrays; along a periodic axis the last
    node duplicates the first.  The *inner* nodes are the unknowns of the
    five-point system: all distinct nodes of a periodic axis, and nodes
    ``1 .. n-2`` of a Dirichlet axis.
    """

    def __init__(self, grid: UniformGrid2D, periodic_x: bool = False,
                 periodic_y: bool = False):
        self.grid = grid
        self.px, self.py = bool(periodic_x), bool(periodic_y)
        self.h, self.k = grid.h, grid.k
        ny, nx = grid.shape
        self.ix = slice(0, nx - 1) if self.px else slice(1, nx - 1)
        self.iy = slice(0, ny - 1) if self.py else slice(1, ny - 1)
        self.inner_shape = (ny - 1 if self.py else ny - 2,
                            nx - 1 if self.px else nx - 2)
        self.dim = self.inner_shape[0] * self.inner_shape[1]

    def pad(self, a: np.ndarray) -> np.ndarray:
        """Array whose ``[1:-1, 1:-1]`` block is the inner nodes, with one
        neighbour layer on every side (wrapped on periodic axes)."""
        if self.px:
            a = np.concatenate([a[:, -2:-1], a], axis=1)
        if self.py:
            a = np.concatenate([a[-2:-1, :], a], axis=0)
        return a

    def scatter(self, inner: np.ndarray, out: np.ndarray) -> np.ndarray:
        out[self.iy, self.ix] = inner
        self.sync(out)
        return out

    def sync(self, a: np.ndarray) -> np.ndarray:
        """Copy periodic duplicates from the first node onto the last."""
        if self.px:
            a[:, -1] = a[:, 0]
        if self.py:
            a[-1, :] = a[0, :]
        return a

    def inner(self, a: np.ndarray) -> np.ndarray:
        return a[self.iy, self.ix]

    def d1x(self, P):
        return (P[1:-1, 2:] - P[1:-1, :-2]) / (2 * self.h)

    def d1y(self, P):
        return (P[2:, 1:-1] - P[:-2, 1:-1]) / (2 * self.k)

    def d2x(self, P):
        return (P[1:-1, 2:] - 2 * P[1:-1, 1:-1] + P[1:-1, :-2]) / self.h ** 2

    def d2y(self, P):
        return (P[2:, 1:-1] - 2 * P[1:-1, 1:-1] + P[:-2, 1:-1]) / self.k ** 2

    def laplacian(self, phi):
        """``(delta_xx + delta_yy) phi`` at inner nodes."""
        P = self.pad(phi)
        return self.d2x(P) + self.d2y(P)

    def convective(self, phi_x, phi_y, c, d):
        """``(delta_x + c) phi_x + (delta_y + d) phi_y`` at inner nodes."""
        Px, Py = self.pad(phi_x), self.pad(phi_y)
        return (self.d1x(Px) + self.inner(c) * self.inner(phi_x)
                + self.d1y(Py) + self.inner(d) * self.inner(phi_y))

    def steady(self, phi, phi_x, phi_y, c, d):
        """Compact steady operator at inner nodes."""
        return -2.0 * self.laplacian(phi) + self.convective(phi_x, phi_y, c, d)

    def helmholtz(self, diag: float, lap: float) -> LinearOperator:
        """Matrix-free ``diag - lap (delta_xx + delta_yy)`` on inner unknowns,
        homogeneous at Dirichlet boundaries."""
        my, mx = self.inner_shape
        W = np.zeros((my + 2, mx + 2))
        px, py = self.px, self.py
        cx, cy = lap / self.h ** 2, lap / self.k ** 2
        cc = diag + 2 * cx + 2 * cy

        def apply(v):
            W[1:-1, 1:-1] = v.reshape(my, mx)
            if px:
                W[:, 0] = W[:, -2]
                W[:, -1] = W[:, 1]
            if py:
                W[0, :] = W[-2, :]
                W[-1, :] = W[1, :]
            out = cc * W[1:-1, 1:-1]
            out -= cx * (W[1:-1, 2:] + W[1:-1, :-2])
            out -= cy * (W[2:, 1:-1] + W[:-2, 1:-1])
            return out.ravel()

        return LinearOperator(apply, self.dim)

    def solve_helmholtz(self, diag: float, lap: float, rhs_inner: np.ndarray,
                        boundary: np.ndarray, x0: np.ndarray, tol: float,
                        max_iter: int, gauge: bool = False, rtol: float = 0.0):
        """Solve ``(diag - lap Laplacian) phi = rhs`` at inner nodes with
        Dirichlet values taken from ``boundary``.

        ``gauge`` removes the mean of the right-hand side and the solution
        (fully periodic Poisson problem).  With ``rtol > 0`` the Krylov
        solve stops at ``max(tol, rtol * ||r0||)``.  The tolerance is never
        taken below ``32 eps (||b|| + ||A|| ||x||)``, where round-off makes
        it unreachable.  Returns the full array
        and the Krylov statistics.
        """
        b = np.array(rhs_inner, dtype=float)
        if not (self.px and self.py):
            B = boundary.copy()
            B[self.iy, self.ix] = 0.0
            b += lap * self.laplacian(B)
        if gauge:
            b -= b.mean()
        x = np.array(self.inner(x0), dtype=float).ravel()
        my, mx = self.inner_shape
        cx, cy = lap / self.h ** 2, lap / self.k ** 2
        b = b.ravel()
        if rtol > 0.0:
            r0 = np.empty_like(b)
            apply5(x, r0, my, mx, float(diag), cx, cy, self.px, self.py)
            tol = max(tol, rtol * float(np.linalg.norm(b - r0)))
        status, its, res = bicgstab5(b, x, my, mx, float(diag), cx, cy,
                                     self.px, self.py, float(tol), int(max_iter),
                                     _ROUNDOFF_FLOOR)
        stats = IterStats(its, res, status == 0)
        if status == 1:
            raise ConvergenceError(f"BiCGStab did not reach {tol:.1e} in {max_iter} "
                                   f"iterations (residual {res:.3e})", x, stats)
        if status > 1:
            raise BreakdownError(f"BiCGStab breakdown after {its} iterations")
        if gauge:
            x -= x.mean()
        out = boundary.copy()
        return self.scatter(x.reshape(self.inner_shape), out), stats


def _bc_stencil(grid: UniformGrid2D, bc: Optional[BoundarySpec]) -> Stencil:
    if bc is None:
        return Stencil(grid)
    return Stencil(grid, bc.periodic_x, bc.periodic_y)


# -- public operations -------------------------------------------------------

def apply_steady_operator(state: TransportState, coeffs: Coefficients, t: float,
                          bc: Optional[BoundarySpec] = None) -> ScalarField:
    """``-2 delta_xx phi - 2 delta_yy phi + (delta_x + c) phi_x + (delta_y + d) phi_y``.

    Boundary nodes (of non-periodic axes) are returned as zero.
    """
    g = state.grid
    st = _bc_stencil(g, bc)
    c, d, _ = coeffs.sample(g, t)
    vals = st.steady(state.phi.values, state.phi_x.values, state.phi_y.values, c, d)
    return ScalarField(g, st.scatter(vals, np.zeros(g.shape)))


def apply_unsteady_lhs(phi: ScalarField, cfg: SchemeConfig,
                       bc: Optional[BoundarySpec] = None) -> ScalarField:
    """Matrix-free ``[a - 2 iota dt (delta_xx + delta_yy)] phi``.

    Dirichlet boundary nodes are pinned rows and return ``a * phi``.
    """
    g = phi.grid
    st = _bc_stencil(g, bc)
    out = cfg.a * np.array(phi.values)
    vals = cfg.a * st.inner(phi.values) - 2 * cfg.iota * cfg.dt * st.laplacian(phi.values)
    return ScalarField(g, st.scatter(vals, out))


class TransportStepper:
    """Advances one transport equation on a fixed grid with fixed boundary data.

    Holds the stencil and Pade closures so a long march does not rebuild
    them every step.
    """

    def __init__(self, grid: UniformGrid2D, coeffs: Coefficients, cfg: SchemeConfig,
                 bc: BoundarySpec):
        self.grid = grid
        self.coeffs = coeffs
        self.cfg = cfg
        self.bc = bc
        self.stencil = Stencil(grid, bc.periodic_x, bc.periodic_y)
        self.closure_x = closure_from_bc(bc, "x")
        self.closure_y = closure_from_bc(bc, "y")
        self.linear_iterations = 0

    def derivatives(self, phi: np.ndarray, t: float):
        return (dx_array(phi, self.grid, self.closure_x, t),
                dy_array(phi, self.grid, self.closure_y, t))

    def boundary(self, t: float, like: np.ndarray) -> np.ndarray:
        return self.bc.edge_values(self.grid, t, out=np.array(like, dtype=float))

    def explicit_part(self, phi, phi_x, phi_y, c, d, s):
        """Level-``n`` contribution to the right-hand side at inner nodes."""
        cfg, st = self.cfg, self.stencil
        w = (1.0 - cfg.iota) * cfg.dt
        rhs = cfg.a * st.inner(phi)
        if w:
            rhs = rhs + w * (2.0 * st.laplacian(phi)
                             - st.convective(phi_x, phi_y, c, d) + st.inner(s))
        return rhs

    def implicit_solve(self, explicit, phi_guess, phi_x, phi_y, c, d, s, boundary):
        """One correction: solve the level-``n+1`` system with lagged
        derivative fields."""
        cfg, st = self.cfg, self.stencil
        w = cfg.iota * cfg.dt
        rhs = explicit
        if w:
            rhs = rhs + w * (st.inner(s) - st.convective(phi_x, phi_y, c, d))
        phi, stats = st.solve_helmholtz(cfg.a, 2.0 * w, rhs, boundary, phi_guess,
                                        cfg.linear_tol, cfg.max_linear,
                                        rtol=cfg.linear_rtol)
        self.linear_iterations += stats.iterations
        return phi

    def step(self, phi, phi_x, phi_y, t):
        """Arrays at ``t`` to arrays at ``t + dt`` plus inner-loop stats."""
        cfg = self.cfg
        t1 = t + cfg.dt
        c0, d0, s0 = self.coeffs.sample(self.grid, t)
        c1, d1, s1 = self.coeffs.sample(self.grid, t1)
        explicit = self.explicit_part(phi, phi_x, phi_y, c0, d0, s0)
        boundary = self.boundary(t1, phi)
        old, ox, oy = phi, phi_x, phi_y
        change = np.inf
        for it in range(1, cfg.max_inner + 1):
            new = self.implicit_solve(explicit, old, ox, oy, c1, d1, s1, boundary)
            ox, oy = self.derivatives(new, t1)
            change = float(np.max(np.abs(new - old)))
            old = new
            if change < cfg.inner_tol:
                return new, ox, oy, IterStats(it, change, True)
        raise ConvergenceError(
            f"correction loop did not settle in {cfg.max_inner} passes at t = {t1:.6g} "
            f"(last change {change:.3e})", (old, ox, oy),
            IterStats(cfg.max_inner, change, False))

    def advance(self, state: TransportState) -> tuple[TransportState, IterStats]:
        phi, px, py, stats = self.step(state.phi.values, state.phi_x.values,
                                       state.phi_y.values, state.t)
        t1 = state.t + self.cfg.dt
        g = self.grid
        return (TransportState(ScalarField(g, phi), ScalarField(g, px),
                               ScalarField(g, py), t1), stats)


def advance(state: TransportState, coeffs: Coefficients, cfg: SchemeConfig,
            bc: BoundarySpec) -> tuple[TransportState, IterStats]:
    """One time step of the weighted scheme with correction to convergence."""
    return TransportStepper(state.grid, coeffs, cfg, bc).advance(state)


def march(state: TransportState, coeffs: Coefficients, cfg: SchemeConfig,
          bc: BoundarySpec, t_end: float,
          callback: Optional[Callable[[TransportState], None]] = None) -> TransportState:
    """Repeated :func:`advance` up to ``t_end`` (rounded to whole steps)."""
    stepper = TransportStepper(state.grid, coeffs, cfg, bc)
    nsteps = int(round((t_end - state.t) / cfg.dt))
    if nsteps < 0:
        raise ValueError("t_end lies before the state's time")
    g = stepper.grid
    phi, px, py, t = state.phi.values, state.phi_x.values, state.phi_y.values, state.t
    for n in range(nsteps):
        phi, px, py, _ = stepper.step(phi, px, py, t)
        t = state.t + (n + 1) * cfg.dt
        if callback is not None:
            callback(TransportState(ScalarField(g, phi), ScalarField(g, px),
                                    ScalarField(g, py), t))
    return TransportState(ScalarField(g, phi), ScalarField(g, px), ScalarField(g, py), t)


class SteadySolver:
    """Correction-to-convergence solver for the steady compact equation.

    Each pass solves ``-2 (delta_xx + delta_yy) phi = s - (delta_x + c) phi_x
    - (delta_y + d) phi_y`` for ``phi`` with the derivative fields lagged,
    then refreshes the derivatives.  The pass contracts by about one half per
    sweep for ``c = d = 0``; strong convection can make it diverge.
    """

    def __init__(self, grid: UniformGrid2D, cfg: SchemeConfig, bc: BoundarySpec,
                 closure_x: Optional[DerivativeClosure] = None,
                 closure_y: Optional[DerivativeClosure] = None):
        self.grid = grid
        self.cfg = cfg
        self.bc = bc
        self.stencil = Stencil(grid, bc.periodic_x, bc.periodic_y)
        self.closure_x = closure_x or closure_from_bc(bc, "x")
        self.closure_y = closure_y or closure_from_bc(bc, "y")
        self.gauge = bc.periodic_x and bc.periodic_y
        self.linear_iterations = 0

    def correct(self, phi, phi_x, phi_y, c, d, s, boundary):
        """One linear solve with the given (lagged) derivative fields."""
        st = self.stencil
        rhs = st.inner(s) - st.convective(phi_x, phi_y, c, d)
        new, stats = st.solve_helmholtz(0.0, 2.0, rhs, boundary, phi,
                                        self.cfg.linear_tol, self.cfg.max_linear,
                                        gauge=self.gauge, rtol=self.cfg.linear_rtol)
        self.linear_iterations += stats.iterations
        return new

    def derivatives(self, phi, t):
        return (dx_array(phi, self.grid, self.closure_x, t),
                dy_array(phi, self.grid, self.closure_y, t))

    def solve(self, phi, phi_x, phi_y, c, d, s, t, boundary=None):
        cfg = self.cfg
        if boundary is None:
            boundary = self.bc.edge_values(self.grid, t, out=np.array(phi, dtype=float))
        old, ox, oy = phi, phi_x, phi_y
        change = np.inf
        for it in range(1, cfg.max_inner + 1):
            new = self.correct(old, ox, oy, c, d, s, boundary)
            ox, oy = self.derivatives(new, t)
            change = float(np.max(np.abs(new - old)))
            old = new
            if change < cfg.inner_tol:
                return new, ox, oy, IterStats(it, change, True)
        raise ConvergenceError(
            f"steady correction loop did not settle in {cfg.max_inner} passes "
            f"(last change {change:.3e})", (old, ox, oy),
            IterStats(cfg.max_inner, change, False))


def solve_steady(coeffs: Coefficients, cfg: SchemeConfig, bc: BoundarySpec,
                 initial_guess: Union[TransportState, UniformGrid2D]
                 ) -> tuple[TransportState, IterStats]:
    """Solve the steady compact equation (``a`` and ``dt`` are unused).

    ``initial_guess`` may be a bare grid, in which case iteration starts from
    zero.  A fully periodic problem is solved in the zero-mean gauge.
    """
    if isinstance(initial_guess, UniformGrid2D):
        g = initial_guess
        initial_guess = TransportState.from_phi(ScalarField(g, np.zeros(g.shape)), bc, 0.0)
    g, t = initial_guess.grid, initial_guess.t
    solver = SteadySolver(g, cfg, bc)
    c, d, s = coeffs.sample(g, t)
    phi, px, py, stats = solver.solve(initial_guess.phi.values, initial_guess.phi_x.values,
                                      initial_guess.phi_y.values, c, d, s, t)
    return (TransportState(ScalarField(g, phi), ScalarField(g, px), ScalarField(g, py), t),
            stats)
