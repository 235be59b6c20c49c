"""Stream function-vorticity Navier-Stokes on top of the compact scheme.

The vorticity equation ``omega_t + u omega_x + v omega_y - lap(omega)/Re = S``
is multiplied by ``Re`` to fit the transport template with ``a = Re``,
``c = Re psi_y``, ``d = -Re psi_x`` and source ``Re S``.  The stream function
solves the steady compact equation ``-lap(psi) = omega`` with ``c = d = 0``.
Per time step both systems are corrected in tandem until ``psi`` settles.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .grid import BoundarySpec, FieldFunction, ScalarField, UniformGrid2D, sample
from .linalg import ConvergenceError, IterStats
from .pade import dx_array, dy_array
from .problems import (cavity_bcs, jensen_wall_vorticity, ns_manufactured,
                       ns_manufactured_bcs, ns_manufactured_derivatives, shear_omega)
from .scheme import Coefficients, SchemeConfig, SteadySolver, TransportStepper

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class NSState:
    psi: ScalarField
    omega: ScalarField
    psi_x: ScalarField
    psi_y: ScalarField
    omega_x: ScalarField
    omega_y: ScalarField
    t: float = 0.0

    @property
    def grid(self) -> UniformGrid2D:
        return self.psi.grid

    @property
    def u(self) -> np.ndarray:
        return np.asarray(self.psi_y.values)

    @property
    def v(self) -> np.ndarray:
        return -np.asarray(self.psi_x.values)


WallVorticity = Callable[[np.ndarray, UniformGrid2D], np.ndarray]


class StreamVorticitySolver:
    """Time stepper for the coupled ``(psi, omega)`` system on one grid.

    Parameters
    ----------
    grid, Re : grid and Reynolds number.
    cfg : time step, ``iota`` and tolerances; ``cfg.a`` is replaced by ``Re``.
    psi_bc, omega_bc : boundary specs.  Missing derivative functions in
        ``omega_bc`` select one-sided Pade closures.
    source : vorticity source ``S(x, y, t)`` before multiplication by ``Re``.
    wall_vorticity : if given, ``omega`` wall values are recomputed from
        ``psi`` on every correction pass instead of read from ``omega_bc``.
    """

    def __init__(self, grid: UniformGrid2D, Re: float, cfg: SchemeConfig,
                 psi_bc: BoundarySpec, omega_bc: BoundarySpec,
                 source: Optional[FieldFunction] = None,
                 wall_vorticity: Optional[WallVorticity] = None):
        if Re <= 0:
            raise ValueError("Re must be positive")
        self.grid = grid
        self.Re = float(Re)
        self.cfg = replace(cfg, a=self.Re)
        self.psi_bc = psi_bc
        self.omega_bc = omega_bc
        self.source = source
        self.wall_vorticity = wall_vorticity
        src = (lambda x, y, t: self.Re * source(x, y, t)) if source else (lambda x, y, t: 0.0)
        self._src = Coefficients(s=src)
        self.omega_stepper = TransportStepper(grid, self._src, self.cfg, omega_bc)
        self.poisson = SteadySolver(grid, self.cfg, psi_bc)
        self._zero = np.zeros(grid.shape)

    # -- pieces --------------------------------------------------------------

    def source_field(self, t):
        if self.source is None:
            return self._zero
        return self._src.sample(self.grid, t)[2]

    def psi_derivatives(self, psi, t):
        return self.poisson.derivatives(psi, t)

    def omega_derivatives(self, omega, t):
        return self.omega_stepper.derivatives(omega, t)

    def omega_boundary(self, psi, omega, t):
        if self.wall_vorticity is not None:
            return self.wall_vorticity(psi, self.grid, out=np.array(omega, dtype=float))
        return self.omega_stepper.boundary(t, omega)

    def solve_psi(self, omega, t, psi=None, max_inner=None):
        """Stream function from vorticity by correction to convergence."""
        g = self.grid
        psi = np.zeros(g.shape) if psi is None else psi
        px, py = self.psi_derivatives(psi, t)
        cfg = self.poisson.cfg
        if max_inner is not None:
            self.poisson.cfg = replace(cfg, max_inner=max_inner)
        try:
            return self.poisson.solve(psi, px, py, self._zero, self._zero, omega, t)
        finally:
            self.poisson.cfg = cfg

    def state_from_omega(self, omega: np.ndarray, t: float = 0.0,
                         psi_guess: Optional[np.ndarray] = None) -> NSState:
        psi, px, py, _ = self.solve_psi(omega, t, psi_guess, max_inner=1000)
        omega = self.omega_boundary(psi, omega, t)
        wx, wy = self.omega_derivatives(omega, t)
        return self.pack(psi, omega, px, py, wx, wy, t)

    def pack(self, psi, omega, px, py, wx, wy, t) -> NSState:
        g = self.grid
        return NSState(*(ScalarField(g, a) for a in (psi, omega, px, py, wx, wy)), t)

    # -- stepping ------------------------------------------------------------

    def step(self, arrays, t, guess=None):
        """``(psi, omega, psi_x, psi_y, omega_x, omega_y)`` at ``t`` to ``t + dt``.

        ``guess`` (same layout) is where the correction passes start; by
        default the level-``n`` arrays.  It changes the pass count, not the
        converged result.
        """
        psi, omega, px, py, wx, wy = arrays
        cfg, Re = self.cfg, self.Re
        t1 = t + cfg.dt
        stepper = self.omega_stepper
        explicit = stepper.explicit_part(omega, wx, wy, Re * py, -Re * px,
                                         self.source_field(t))
        if guess is not None:
            psi, omega, px, py, wx, wy = guess
        s1 = self.source_field(t1)
        psi_b = self.poisson.bc.edge_values(self.grid, t1, out=np.array(psi))
        change = np.inf
        for it in range(1, cfg.max_inner + 1):
            omega_b = self.omega_boundary(psi, omega, t1)
            omega = stepper.implicit_solve(explicit, omega, wx, wy, Re * py, -Re * px,
                                           s1, omega_b)
            wx, wy = self.omega_derivatives(omega, t1)
            new = self.poisson.correct(psi, px, py, self._zero, self._zero, omega, psi_b)
            px, py = self.psi_derivatives(new, t1)
            change = float(np.max(np.abs(new - psi)))
            psi = new
            if change < cfg.inner_tol:
                return (psi, omega, px, py, wx, wy), IterStats(it, change, True)
        raise ConvergenceError(
            f"psi-omega correction loop did not settle in {cfg.max_inner} passes "
            f"at t = {t1:.6g} (last change {change:.3e})",
            (psi, omega, px, py, wx, wy), IterStats(cfg.max_inner, change, False))

    def advance(self, state: NSState) -> tuple[NSState, IterStats]:
        arrays = tuple(np.asarray(f.values) for f in
                       (state.psi, state.omega, state.psi_x, state.psi_y,
                        state.omega_x, state.omega_y))
        out, stats = self.step(arrays, state.t)
        return self.pack(*out, state.t + self.cfg.dt), stats

    @staticmethod
    def _extrapolate(new, old):
        return tuple(2.0 * a - b for a, b in zip(new, old))

    def march(self, state: NSState, t_end: float,
              callback: Optional[Callable[[NSState], None]] = None,
              extrapolate: bool = False) -> NSState:
        """Step to ``t_end``.  ``extrapolate`` starts each step's correction
        passes from ``2 X^n - X^{n-1}`` instead of ``X^n``."""
        nsteps = int(round((t_end - state.t) / self.cfg.dt))
        if nsteps < 0:
            raise ValueError("t_end lies before the state's time")
        arrays = tuple(np.asarray(f.values) for f in
                       (state.psi, state.omega, state.psi_x, state.psi_y,
                        state.omega_x, state.omega_y))
        t = state.t
        prev = None
        for n in range(nsteps):
            guess = self._extrapolate(arrays, prev) if extrapolate and prev else None
            prev = arrays
            arrays, _ = self.step(arrays, t, guess)
            t = state.t + (n + 1) * self.cfg.dt
            if callback is not None:
                callback(self.pack(*arrays, t))
        return self.pack(*arrays, t)

    def march_to_steady(self, state: NSState, steady_tol: float = 1e-10,
                        max_steps: int = 200000, log_every: int = 500,
                        extrapolate: bool = True) -> tuple[NSState, int]:
        """Step until the largest per-step change in ``psi`` drops below
        ``steady_tol``.  Returns the final state and the step count.

        ``extrapolate`` as in :meth:`march`; it only saves correction passes.
        """
        arrays = tuple(np.asarray(f.values) for f in
                       (state.psi, state.omega, state.psi_x, state.psi_y,
                        state.omega_x, state.omega_y))
        t = state.t
        prev = None
        for n in range(1, max_steps + 1):
            guess = self._extrapolate(arrays, prev) if extrapolate and prev else None
            new, stats = self.step(arrays, t, guess)
            prev = arrays
            t = state.t + n * self.cfg.dt
            change = float(np.max(np.abs(new[0] - arrays[0])))
            arrays = new
            if log_every and n % log_every == 0:
                log.info("step %d t=%.2f dpsi=%.3e passes=%d", n, t, change, stats.iterations)
            if change < steady_tol:
                return self.pack(*arrays, t), n
        raise ConvergenceError(f"no steady state after {max_steps} steps "
                               f"(last psi change {change:.3e})",
                               self.pack(*arrays, t), None)


def ns_advance(state: NSState, solver: StreamVorticitySolver) -> NSState:
    """One coupled time step (see :meth:`StreamVorticitySolver.step`)."""
    return solver.advance(state)[0]


# -- case set-ups ------------------------------------------------------------

def manufactured_solver(grid: UniformGrid2D, Re: float, cfg: SchemeConfig
                        ) -> StreamVorticitySolver:
    psi_bc, omega_bc, src = ns_manufactured_bcs(Re)
    return StreamVorticitySolver(grid, Re, cfg, psi_bc, omega_bc, source=src)


def manufactured_state(grid: UniformGrid2D, Re: float, t: float = 0.0) -> NSState:
    """Exact fields (derivatives included) of the manufactured solution."""
    X, Y = grid.mesh()
    psi, omega, _ = ns_manufactured(X, Y, t, Re)
    px, py, wx, wy = ns_manufactured_derivatives(X, Y, t, Re)
    return NSState(*(ScalarField(grid, a) for a in (psi, omega, px, py, wx, wy)), t)


def shear_layer_solver(grid: UniformGrid2D, Re: float, cfg: SchemeConfig
                       ) -> StreamVorticitySolver:
    bc = BoundarySpec.periodic()
    return StreamVorticitySolver(grid, Re, cfg, bc, bc)


def shear_layer_init(grid: UniformGrid2D, rho: float = np.pi / 15, sigma: float = 0.05,
                     solver: Optional[StreamVorticitySolver] = None,
                     Re: float = 10000.0, cfg: Optional[SchemeConfig] = None) -> NSState:
    """Initial shear-layer state: analytic vorticity, ``psi`` from the
    periodic compact Poisson solve in the zero-mean gauge."""
    if solver is None:
        solver = shear_layer_solver(grid, Re, cfg or SchemeConfig(a=Re, dt=1e-3))
    omega = sample(grid, lambda x, y, t: shear_omega(x, y, t, rho, sigma)).values.copy()
    return solver.state_from_omega(omega, 0.0)


def cavity_solver(grid: UniformGrid2D, Re: float, cfg: SchemeConfig,
                  lid: float = 1.0) -> StreamVorticitySolver:
    psi_bc, omega_bc = cavity_bcs(lid)

    def wall(psi, g, out=None):
        return jensen_wall_vorticity(psi, g, lid, out)

    return StreamVorticitySolver(grid, Re, cfg, psi_bc, omega_bc, wall_vorticity=wall)


def cavity_rest_state(solver: StreamVorticitySolver) -> NSState:
    """Fluid at rest; the lid enters through the boundary data at the first step."""
    z = np.zeros(solver.grid.shape)
    psi_x, psi_y = solver.psi_derivatives(z, 0.0)
    return solver.pack(z, z, psi_x, psi_y, z, z, 0.0)


def cavity_boundary(state: NSState, lid: float = 1.0) -> NSState:
    """Apply the wall conditions to a cavity state.

    ``psi`` is zeroed on the walls, its wall derivatives are set (``psi_y``
    equals ``lid`` on the top wall), ``omega`` wall values come from the
    Jensen formula and the ``omega`` derivatives are recomputed with
    one-sided Pade ends.
    """
    g = state.grid
    psi = np.array(state.psi.values)
    psi[0, :] = psi[-1, :] = psi[:, 0] = psi[:, -1] = 0.0
    psi_bc, omega_bc = cavity_bcs(lid)
    solver = StreamVorticitySolver(g, 1.0, SchemeConfig(), psi_bc, omega_bc)
    px, py = solver.psi_derivatives(psi, state.t)
    omega = jensen_wall_vorticity(psi, g, lid, out=np.array(state.omega.values))
    wx, wy = solver.omega_derivatives(omega, state.t)
    return solver.pack(psi, omega, px, py, wx, wy, state.t)
