"""Error norms, convergence-order estimates, benchmark runs and CSV output."""
from __future__ import annotations

import csv
import logging
import math
import os
import time
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .analysis import max_gain_grid, wavenumber_table
from .grid import ScalarField, UniformGrid2D, make_grid, sample
from .navier_stokes import (cavity_rest_state, cavity_solver, manufactured_solver,
                            manufactured_state, shear_layer_init, shear_layer_solver)
from .problems import (cavity_case, find_vortices, gauss_case, gauss_setup,
                       gaussian_dx, gaussian_dy, ns_manufactured,
                       ns_manufactured_case, shear_case, taylor_case, taylor_dx,
                       taylor_dy, taylor_setup)
from .scheme import SchemeConfig, TransportState, march

log = logging.getLogger(__name__)

CASES = ("taylor", "gauss", "ns-manufactured", "shear", "cavity")
ERROR_COLUMNS = ("case", "nx", "ny", "dt", "iota", "t", "l1", "l2", "linf", "order")
DEFAULT_T_END = {"taylor": 0.25, "gauss": 0.5, "ns-manufactured": 1.0,
                 "shear": 1.0, "cavity": 1.0}
CAVITY_GRID = {1000: 65, 3200: 129, 5000: 129, 7500: 129}


class EstimationError(ValueError):
    """An order estimate has no meaningful value for the given data."""


# -- norms -------------------------------------------------------------------

@dataclass(frozen=True)
class ErrorReport:
    l1: float
    l2: float
    linf: float
    nx: int
    ny: int
    t: float = 0.0
    case: str = ""

    @property
    def dims(self) -> tuple[int, int]:
        return self.nx, self.ny


def error_norms(numeric: ScalarField, exact: ScalarField, t: float = 0.0,
                case: str = "", convention: str = "nodes") -> ErrorReport:
    """Discrete L1, L2 and max norms of ``numeric - exact`` over all nodes.

    ``convention="nodes"`` averages over the ``nx * ny`` nodes, so a constant
    error ``e`` has all three norms equal to ``|e|``.  ``convention="cells"``
    divides the sums by ``(nx - 1)(ny - 1)`` instead, a per-cell average.
    """
    if numeric.grid != exact.grid:
        raise ValueError("fields live on different grids")
    e = np.asarray(numeric.values) - np.asarray(exact.values)
    ny, nx = e.shape
    if convention == "nodes":
        count = e.size
    elif convention == "cells":
        count = (nx - 1) * (ny - 1)
    else:
        raise ValueError(f"unknown norm convention {convention!r}")
    ae = np.abs(e)
    return ErrorReport(float(ae.sum() / count), float(math.sqrt((e * e).sum() / count)),
                       float(ae.max()), nx, ny, t, case)


def observed_order(err_coarse: float, err_fine: float) -> float:
    """``log2(err_coarse / err_fine)`` for a grid (or step) halving."""
    if not (err_coarse > 0 and err_fine > 0):
        raise EstimationError("errors must be positive to estimate an order")
    return math.log2(err_coarse / err_fine)


def perceived_order(diff31: float, diff32: float, h1: float, h2: float, h3: float,
                    tol: float = 1e-10) -> float:
    """Order ``p`` with ``(h1^p - h3^p) / (h2^p - h3^p) = diff31 / diff32``.

    ``diff31`` and ``diff32`` are norms of the finest solution minus the
    coarsest and the middle one.  Solved by bisection on ``(0, 10]``.
    """
    if not (diff31 > diff32 > 0):
        raise EstimationError("need diff31 > diff32 > 0")
    if not (h1 > h2 > h3 > 0):
        raise EstimationError("need h1 > h2 > h3 > 0")
    target = diff31 / diff32

    def f(p):
        return (h1 ** p - h3 ** p) / (h2 ** p - h3 ** p) - target

    # the ratio increases monotonically from (ln h1 - ln h3)/(ln h2 - ln h3) at p -> 0
    lo = 1e-12
    hi = 10.0
    flo, fhi = f(lo), f(hi)
    if flo > 0 or fhi < 0:
        raise EstimationError(f"no order in (0, 10] reproduces ratio {target:.6g}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def perceived_order_halving(diff31: float, diff32: float) -> float:
    """Closed form ``log2(diff31 / diff32 - 1)`` for ``h1 = 2 h2 = 4 h3``."""
    r = diff31 / diff32
    if not r > 1:
        raise EstimationError("need diff31 > diff32")
    return math.log2(r - 1.0)


def restrict_to_common(fine: ScalarField, coarse_grid: UniformGrid2D) -> ScalarField:
    """Inject ``fine`` onto the nodes of ``coarse_grid`` it shares."""
    fg = fine.grid
    if (fg.x0, fg.y0, fg.lx, fg.ly) != (coarse_grid.x0, coarse_grid.y0,
                                         coarse_grid.lx, coarse_grid.ly):
        raise ValueError("grids cover different domains")
    sx, rx = divmod(fg.nx - 1, coarse_grid.nx - 1)
    sy, ry = divmod(fg.ny - 1, coarse_grid.ny - 1)
    if rx or ry or sx < 1 or sy < 1:
        raise ValueError(f"{fg.nx}x{fg.ny} grid does not nest a "
                         f"{coarse_grid.nx}x{coarse_grid.ny} grid")
    return ScalarField(coarse_grid, np.asarray(fine.values)[::sy, ::sx])


# -- runs --------------------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    """One benchmark run.  ``None`` parameters take the case defaults."""

    case: str
    nx: int
    ny: Optional[int] = None
    dt: Optional[float] = None
    iota: float = 0.5
    t_end: Optional[float] = None
    re: Optional[float] = None
    a: Optional[float] = None
    c: Optional[float] = None
    d: Optional[float] = None
    inner_tol: float = 1e-12
    linear_tol: float = 1e-10
    linear_rtol: float = 0.0
    norms: str = "nodes"
    out: Optional[str] = None

    def __post_init__(self):
        if self.case not in CASES:
            raise ValueError(f"unknown case {self.case!r}; choose from {', '.join(CASES)}")
        if self.nx < 3 or (self.ny is not None and self.ny < 3):
            raise ValueError("grids need at least 3 nodes per direction")
        if self.dt is not None and not self.dt > 0:
            raise ValueError("dt must be positive")
        if not 0.0 <= self.iota <= 1.0:
            raise ValueError("iota must lie in [0, 1]")
        if self.t_end is not None and self.t_end < 0:
            raise ValueError("t_end must be non-negative")

    @property
    def grid_ny(self) -> int:
        return self.nx if self.ny is None else self.ny

    @property
    def end_time(self) -> float:
        return DEFAULT_T_END[self.case] if self.t_end is None else self.t_end

    def grid(self) -> UniformGrid2D:
        x0, y0, lx, ly = _case(self).domain
        return make_grid(self.nx, self.grid_ny, x0, y0, lx, ly)

    def time_step(self) -> float:
        if self.dt is not None:
            return self.dt
        g = self.grid()
        return 0.01 if self.case == "cavity" else g.h * g.k

    def scheme(self, a: float = 1.0) -> SchemeConfig:
        return SchemeConfig(a=a, iota=self.iota, dt=self.time_step(),
                            inner_tol=self.inner_tol, linear_tol=self.linear_tol,
                            linear_rtol=self.linear_rtol)


@dataclass
class RunResult:
    config: RunConfig
    t: float
    reports: list = field(default_factory=list)
    fields: dict = field(default_factory=dict)
    vortices: list = field(default_factory=list)
    steps: int = 0
    seconds: float = 0.0


def _case(cfg: RunConfig):
    if cfg.case == "taylor":
        return taylor_case()
    if cfg.case == "gauss":
        return gauss_case(*_gauss_params(cfg))
    if cfg.case == "ns-manufactured":
        return ns_manufactured_case(cfg.re or 1.0)
    if cfg.case == "shear":
        return shear_case(cfg.re or 10000.0)
    return cavity_case(cfg.re or 1000.0)


def _gauss_params(cfg: RunConfig):
    return (100.0 if cfg.a is None else cfg.a, 80.0 if cfg.c is None else cfg.c,
            80.0 if cfg.d is None else cfg.d)


def _run_transport(cfg: RunConfig, res: RunResult):
    g = cfg.grid()
    if cfg.case == "taylor":
        coeffs, bc = taylor_setup()
        exact, dx, dy = taylor_case().exact, taylor_dx, taylor_dy
        a = 1.0
    else:
        a, c, d = _gauss_params(cfg)
        coeffs, bc = gauss_setup(a, c, d)
        exact = gauss_case(a, c, d).exact
        dx = lambda x, y, t: gaussian_dx(x, y, t, a, c, d)
        dy = lambda x, y, t: gaussian_dy(x, y, t, a, c, d)
    sc = cfg.scheme(a)
    state = TransportState(sample(g, exact, 0.0), sample(g, dx, 0.0), sample(g, dy, 0.0), 0.0)
    out = march(state, coeffs, sc, bc, cfg.end_time)
    res.t = out.t
    res.steps = int(round(out.t / sc.dt))
    res.fields["phi"] = out.phi
    res.reports.append(error_norms(out.phi, sample(g, exact, out.t), out.t, cfg.case,
                                   cfg.norms))


def _run_manufactured(cfg: RunConfig, res: RunResult):
    g = cfg.grid()
    Re = cfg.re or 1.0
    solver = manufactured_solver(g, Re, cfg.scheme())
    st = solver.march(manufactured_state(g, Re), cfg.end_time)
    X, Y = g.mesh()
    psi, omega, _ = ns_manufactured(X, Y, st.t, Re)
    res.t = st.t
    res.steps = int(round(st.t / solver.cfg.dt))
    res.fields.update(psi=st.psi, omega=st.omega)
    res.reports.append(error_norms(st.psi, ScalarField(g, psi), st.t,
                                   "ns-manufactured:psi", cfg.norms))
    res.reports.append(error_norms(st.omega, ScalarField(g, omega), st.t,
                                   "ns-manufactured:omega", cfg.norms))


def _run_shear(cfg: RunConfig, res: RunResult):
    g = cfg.grid()
    solver = shear_layer_solver(g, cfg.re or 10000.0, cfg.scheme())
    st = solver.march(shear_layer_init(g, solver=solver), cfg.end_time)
    res.t = st.t
    res.steps = int(round(st.t / solver.cfg.dt))
    res.fields.update(psi=st.psi, omega=st.omega, u=ScalarField(g, st.u),
                      v=ScalarField(g, st.v))


def _run_cavity(cfg: RunConfig, res: RunResult, steady_tol: Optional[float] = None):
    g = cfg.grid()
    solver = cavity_solver(g, cfg.re or 1000.0, cfg.scheme())
    st0 = cavity_rest_state(solver)
    if steady_tol is None:
        st = solver.march(st0, cfg.end_time)
        res.steps = int(round(st.t / solver.cfg.dt))
    else:
        st, res.steps = solver.march_to_steady(st0, steady_tol)
    res.t = st.t
    res.fields.update(psi=st.psi, omega=st.omega, u=ScalarField(g, st.u),
                      v=ScalarField(g, st.v))
    res.vortices = find_vortices(st.psi)


def simulate(cfg: RunConfig, steady_tol: Optional[float] = None) -> RunResult:
    """Run one case and collect norms, final fields and vortices (no files)."""
    res = RunResult(cfg, 0.0)
    t0 = time.perf_counter()
    try:
        if cfg.case in ("taylor", "gauss"):
            _run_transport(cfg, res)
        elif cfg.case == "ns-manufactured":
            _run_manufactured(cfg, res)
        elif cfg.case == "shear":
            _run_shear(cfg, res)
        else:
            _run_cavity(cfg, res, steady_tol)
    except Exception as err:
        raise type(err)(f"{cfg.case} {cfg.nx}x{cfg.grid_ny}: {err}") from err
    res.seconds = time.perf_counter() - t0
    return res


def run_case(cfg: RunConfig, steady_tol: Optional[float] = None) -> RunResult:
    """:func:`simulate` plus CSV output to ``cfg.out`` when it is set.

    Cases with an exact solution write the error table; the shear layer
    writes its final fields; the cavity writes its vortex table.
    """
    res = simulate(cfg, steady_tol)
    if cfg.out:
        if res.reports:
            write_error_csv(cfg.out, error_rows(res.reports, cfg.time_step(), cfg.iota))
        elif cfg.case == "cavity":
            write_vortex_csv(cfg.out, res.vortices, cfg.re or 1000.0, cfg.nx)
        else:
            write_field_csv(cfg.out, res.fields, res.t)
    return res


# -- studies -----------------------------------------------------------------

def error_rows(reports: Sequence[ErrorReport], dt: float, iota: float,
               orders: Optional[Sequence[Optional[float]]] = None) -> list[tuple]:
    orders = orders or [None] * len(reports)
    return [(r.case, r.nx, r.ny, dt, iota, r.t, r.l1, r.l2, r.linf, o)
            for r, o in zip(reports, orders)]


def _attach_orders(rows: list[tuple]) -> list[tuple]:
    """Fill the ``order`` column from the previous row of the same case (L-inf)."""
    last: dict = {}
    out = []
    for row in rows:
        prev = last.get(row[0])
        order = observed_order(prev, row[8]) if prev is not None else None
        last[row[0]] = row[8]
        out.append(row[:9] + (order,))
    return out


def convergence(case: str, grids: Sequence[int], dt_rule: str = "h2",
                **overrides) -> list[tuple]:
    """Spatial study: one run per grid, ``dt = h^2`` by default.

    The ``order`` column is the max-norm order against the previous grid.
    """
    rows = []
    for n in grids:
        cfg = RunConfig(case, n, **overrides)
        if dt_rule == "h2":
            g = cfg.grid()
            cfg = replace(cfg, dt=g.h * g.k)
        elif dt_rule != "fixed":
            raise ValueError(f"unknown dt rule {dt_rule!r}")
        res = simulate(cfg)
        rows += error_rows(res.reports, cfg.time_step(), cfg.iota)
    return _attach_orders(sorted(rows, key=lambda r: (r[0], r[1])))


def temporal(case: str, nx: int, dts: Sequence[float], **overrides) -> list[tuple]:
    """Temporal study on one grid; ``order`` compares successive time steps."""
    rows = []
    for dt in dts:
        cfg = RunConfig(case, nx, dt=dt, **overrides)
        rows += error_rows(simulate(cfg).reports, dt, cfg.iota)
    return _attach_orders(sorted(rows, key=lambda r: (r[0], -r[3])))


def _torus_mean(a: np.ndarray) -> float:
    return float(np.mean(a[:-1, :-1]))


@dataclass(frozen=True)
class PerceivedOrder:
    component: str
    norm: str
    diff31: float
    diff32: float
    p: float


def shear_perceived_order(grids: Sequence[int] = (33, 65, 129),
                          dts: Sequence[float] = (0.01, 0.005, 0.0025),
                          t_end: float = 1.0, Re: float = 10000.0,
                          **overrides) -> list[PerceivedOrder]:
    """Perceived order of the shear-layer velocities from three nested grids.

    Differences are taken on the coarser grid of each pair by injection and
    averaged over the distinct nodes of the periodic domain.
    """
    if len(grids) != 3 or len(dts) != 3:
        raise ValueError("need three grids and three time steps")
    fields = []
    for n, dt in zip(grids, dts):
        cfg = RunConfig("shear", n, dt=dt, t_end=t_end, re=Re, **overrides)
        fields.append(simulate(cfg).fields)
        log.info("shear %dx%d done", n, n)
    hs = [f["u"].grid.h for f in fields]
    out = []
    for comp in ("u", "v"):
        f1, f2, f3 = (f[comp] for f in fields)
        d31 = np.asarray(restrict_to_common(f3, f1.grid).values) - np.asarray(f1.values)
        d32 = np.asarray(restrict_to_common(f3, f2.grid).values) - np.asarray(f2.values)
        for norm in ("l1", "l2"):
            if norm == "l1":
                a, b = _torus_mean(np.abs(d31)), _torus_mean(np.abs(d32))
            else:
                a, b = math.sqrt(_torus_mean(d31 ** 2)), math.sqrt(_torus_mean(d32 ** 2))
            out.append(PerceivedOrder(comp, norm, a, b, perceived_order(a, b, *hs)))
    return out


def stability_table(iota: float, samples: int, n_theta: int = 64,
                    seed: int = 0) -> list[tuple]:
    """Max ``|G|`` over an ``n_theta^2`` phase sweep for ``samples`` random
    parameter draws.  Rows ``(sample, iota, c, d, dt, h, k, max_abs_g,
    theta_x, theta_y)``."""
    rng = np.random.default_rng(seed)
    rows = []
    for m in range(samples):
        c, d = rng.uniform(-1e3, 1e3, 2)
        h, k = 10 ** rng.uniform(-3, -0.5, 2)
        dt = 10 ** rng.uniform(-5, 1)
        g, tx, ty = max_gain_grid(n_theta, h, k, c, d, 1.0, dt, iota)
        rows.append((m, iota, float(c), float(d), float(dt), float(h), float(k), g, tx, ty))
    return rows


# -- CSV ---------------------------------------------------------------------

def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(path, header: Sequence[str], rows) -> None:
    d = os.path.dirname(os.fspath(path))
    if d:
        os.makedirs(d, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def write_error_csv(path, rows) -> None:
    write_csv(path, ERROR_COLUMNS, rows)


def write_vortex_csv(path, vortices, re: float, n: int) -> None:
    write_csv(path, ("re", "nx", "kind", "region", "psi", "x", "y", "node_x", "node_y"),
              [(float(re), n, v.kind, v.region, v.value, v.x, v.y, v.node_x, v.node_y)
               for v in vortices])


def write_field_csv(path, fields: dict, t: float) -> None:
    names = sorted(fields)
    g = fields[names[0]].grid
    X, Y = g.mesh()
    cols = [np.asarray(fields[k].values).ravel() for k in names]
    rows = ((t, float(x), float(y), *(float(c[m]) for c in cols))
            for m, (x, y) in enumerate(zip(X.ravel(), Y.ravel())))
    write_csv(path, ("t", "x", "y", *names), rows)


def write_wavenumber_csv(path, pe_values: Sequence[float], samples: int) -> None:
    write_csv(path, ("pe", "kappa_h", "scheme", "re_scaled", "im_scaled"),
              wavenumber_table(pe_values, samples))


def write_stability_csv(path, rows) -> None:
    write_csv(path, ("sample", "iota", "c", "d", "dt", "h", "k", "max_abs_g",
                     "theta_x", "theta_y"), rows)
