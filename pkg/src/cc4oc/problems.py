"""Benchmark problems: closed-form solutions, data and boundary specs."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .grid import BoundarySpec, FieldFunction, ScalarField, UniformGrid2D, make_grid
from .scheme import Coefficients

PI = np.pi


# -- Problem 1: decaying Taylor vortex (pure diffusion, a = 1, c = d = 0) -----

def taylor_exact(x, y, t):
    return np.exp(-2 * PI ** 2 * t) * np.sin(PI * x) * np.sin(PI * y)


def taylor_dx(x, y, t):
    return PI * np.exp(-2 * PI ** 2 * t) * np.cos(PI * x) * np.sin(PI * y)


def taylor_dy(x, y, t):
    return PI * np.exp(-2 * PI ** 2 * t) * np.sin(PI * x) * np.cos(PI * y)


# -- Problem 2: convected and diffused Gaussian pulse ------------------------

def gaussian_exact(x, y, t, a=100.0, c=80.0, d=80.0):
    q = 4 * t + 1
    return np.exp(-(a * x - c * t - 0.5 * a) ** 2 / (a * q)
                  - (a * y - d * t - 0.5 * a) ** 2 / (a * q)) / q


def gaussian_dx(x, y, t, a=100.0, c=80.0, d=80.0):
    q = 4 * t + 1
    return -2 * (a * x - c * t - 0.5 * a) / q * gaussian_exact(x, y, t, a, c, d)


def gaussian_dy(x, y, t, a=100.0, c=80.0, d=80.0):
    q = 4 * t + 1
    return -2 * (a * y - d * t - 0.5 * a) / q * gaussian_exact(x, y, t, a, c, d)


# -- Problem 3: manufactured Navier-Stokes solution --------------------------

def ns_manufactured(x, y, t, Re=1.0):
    """``(psi, omega, source)`` of the decaying quartic stream function."""
    r2 = x * x + y * y
    e = np.exp(-t / Re)
    return r2 * r2 * e, -16.0 * r2 * e, 16.0 / Re * (r2 + 4.0) * e


def ns_manufactured_derivatives(x, y, t, Re=1.0):
    """``(psi_x, psi_y, omega_x, omega_y)``."""
    r2 = x * x + y * y
    e = np.exp(-t / Re)
    return 4 * x * r2 * e, 4 * y * r2 * e, -32 * x * e, -32 * y * e


# -- Problem 4: doubly periodic double shear layer ---------------------------

def _upper_half(y):
    # y == pi goes to the second branch so the discrete vorticity mean vanishes
    return np.asarray(y) >= PI


def shear_u(x, y, t=0.0, rho=PI / 15):
    y = np.asarray(y, float)
    return np.where(_upper_half(y), np.tanh((1.5 * PI - y) / rho),
                    np.tanh((y - 0.5 * PI) / rho)) + 0.0 * x


def shear_v(x, y, t=0.0, sigma=0.05):
    return sigma * np.sin(x) + 0.0 * y


def shear_omega(x, y, t=0.0, rho=PI / 15, sigma=0.05):
    """``v_x - u_y`` of the initial shear-layer velocity."""
    y = np.asarray(y, float)
    u_y = np.where(_upper_half(y), -1.0 / np.cosh((1.5 * PI - y) / rho) ** 2,
                   1.0 / np.cosh((y - 0.5 * PI) / rho) ** 2) / rho
    return sigma * np.cos(x) - u_y


# -- Problem 5: lid-driven cavity --------------------------------------------

def cavity_psi_x(x, y, t):
    return 0.0 * x * y


def cavity_psi_y(x, y, t, lid=1.0):
    """``u`` on the walls: ``lid`` on ``y = 1``, zero elsewhere."""
    return np.where(np.isclose(y, 1.0) & (x > 0) & (x < 1), lid, 0.0) + 0.0 * x


def jensen_wall_vorticity(psi: np.ndarray, grid: UniformGrid2D, lid: float = 1.0,
                          out: Optional[np.ndarray] = None) -> np.ndarray:
    """Second-order wall vorticity for ``-lap(psi) = omega`` with ``psi = 0`` walls.

    Stationary wall: ``omega_w = -(8 psi_1 - psi_2) / (2 s^2)`` with ``s`` the
    normal spacing; the moving lid at ``y = 1`` adds ``-3 lid / k``.  Corner
    values are the mean of their two neighbours along the walls.
    """
    h, k = grid.h, grid.k
    w = np.zeros(grid.shape) if out is None else out
    w[1:-1, 0] = -(8 * psi[1:-1, 1] - psi[1:-1, 2]) / (2 * h * h)
    w[1:-1, -1] = -(8 * psi[1:-1, -2] - psi[1:-1, -3]) / (2 * h * h)
    w[0, 1:-1] = -(8 * psi[1, 1:-1] - psi[2, 1:-1]) / (2 * k * k)
    w[-1, 1:-1] = -(8 * psi[-2, 1:-1] - psi[-3, 1:-1]) / (2 * k * k) - 3 * lid / k
    w[0, 0] = 0.5 * (w[0, 1] + w[1, 0])
    w[0, -1] = 0.5 * (w[0, -2] + w[1, -1])
    w[-1, 0] = 0.5 * (w[-1, 1] + w[-2, 0])
    w[-1, -1] = 0.5 * (w[-1, -2] + w[-2, -1])
    return w


# -- case catalogue ----------------------------------------------------------

@dataclass(frozen=True)
class ProblemCase:
    """One benchmark: parameters, domain and whatever closed forms exist."""

    id: str
    params: dict = field(default_factory=dict)
    domain: tuple = (0.0, 0.0, 1.0, 1.0)  # x0, y0, lx, ly
    periodic: bool = False
    exact: Optional[Callable] = None

    def grid(self, nx: int, ny: Optional[int] = None) -> UniformGrid2D:
        x0, y0, lx, ly = self.domain
        return make_grid(nx, nx if ny is None else ny, x0, y0, lx, ly)


def taylor_case() -> ProblemCase:
    return ProblemCase("taylor", {"a": 1.0, "c": 0.0, "d": 0.0}, exact=taylor_exact)


def gauss_case(a=100.0, c=80.0, d=80.0) -> ProblemCase:
    return ProblemCase("gauss", {"a": a, "c": c, "d": d}, (0.0, 0.0, 2.0, 2.0),
                       exact=lambda x, y, t: gaussian_exact(x, y, t, a, c, d))


def ns_manufactured_case(Re=1.0) -> ProblemCase:
    return ProblemCase("ns-manufactured", {"Re": Re},
                       exact=lambda x, y, t: ns_manufactured(x, y, t, Re))


def shear_case(Re=10000.0, rho=PI / 15, sigma=0.05) -> ProblemCase:
    return ProblemCase("shear", {"Re": Re, "rho": rho, "sigma": sigma},
                       (0.0, 0.0, 2 * PI, 2 * PI), periodic=True)


def cavity_case(Re=1000.0) -> ProblemCase:
    return ProblemCase("cavity", {"Re": Re, "U": 1.0, "L": 1.0, "nu": 1.0 / Re})


def taylor_setup() -> tuple[Coefficients, BoundarySpec]:
    return Coefficients(), BoundarySpec.dirichlet(taylor_exact, taylor_dx, taylor_dy)


def gauss_setup(a=100.0, c=80.0, d=80.0) -> tuple[Coefficients, BoundarySpec]:
    coeffs = Coefficients(lambda x, y, t: c, lambda x, y, t: d)
    bc = BoundarySpec.dirichlet(lambda x, y, t: gaussian_exact(x, y, t, a, c, d),
                                lambda x, y, t: gaussian_dx(x, y, t, a, c, d),
                                lambda x, y, t: gaussian_dy(x, y, t, a, c, d))
    return coeffs, bc


def ns_manufactured_bcs(Re=1.0) -> tuple[BoundarySpec, BoundarySpec, FieldFunction]:
    """Boundary specs for ``psi`` and ``omega`` and the vorticity source."""
    def comp(i, fn):
        return lambda x, y, t: fn(x, y, t, Re)[i]

    psi_bc = BoundarySpec.dirichlet(comp(0, ns_manufactured),
                                    comp(0, ns_manufactured_derivatives),
                                    comp(1, ns_manufactured_derivatives))
    omega_bc = BoundarySpec.dirichlet(comp(1, ns_manufactured),
                                      comp(2, ns_manufactured_derivatives),
                                      comp(3, ns_manufactured_derivatives))
    return psi_bc, omega_bc, comp(2, ns_manufactured)


def cavity_bcs(lid=1.0) -> tuple[BoundarySpec, BoundarySpec]:
    """``psi = 0`` with exact wall derivatives; ``omega`` walls are Dirichlet
    with values refreshed from the Jensen formula and one-sided Pade ends."""
    psi_bc = BoundarySpec.dirichlet(lambda x, y, t: 0.0 * x, cavity_psi_x,
                                    lambda x, y, t: cavity_psi_y(x, y, t, lid))
    omega_bc = BoundarySpec.dirichlet(lambda x, y, t: 0.0 * x)
    return psi_bc, omega_bc


# -- vortex detection --------------------------------------------------------

@dataclass(frozen=True)
class Vortex:
    """A local extremum of the stream function.

    ``x``, ``y`` and ``value`` come from a least-squares paraboloid through
    the 3x3 block around node ``(i, j)``; ``node_x``, ``node_y`` are the
    coordinates of that node.
    """

    value: float
    x: float
    y: float
    kind: str
    region: str
    i: int
    j: int
    node_x: float
    node_y: float


def _paraboloid_fit(block: np.ndarray, h: float, k: float):
    xi, eta = np.meshgrid(np.array([-h, 0.0, h]), np.array([-k, 0.0, k]))
    xi, eta = xi.ravel(), eta.ravel()
    A = np.column_stack([np.ones(9), xi, eta, xi * xi, xi * eta, eta * eta])
    coef = np.linalg.lstsq(A, block.ravel(), rcond=None)[0]
    c0, cx, cy, cxx, cxy, cyy = coef
    H = np.array([[2 * cxx, cxy], [cxy, 2 * cyy]])
    det = np.linalg.det(H)
    if abs(det) < 1e-300 or det <= 0:  # not a definite quadratic
        return None
    dx, dy = np.linalg.solve(H, [-cx, -cy])
    if abs(dx) > h or abs(dy) > k:
        return None
    val = c0 + cx * dx + cy * dy + cxx * dx * dx + cxy * dx * dy + cyy * dy * dy
    return float(val), float(dx), float(dy)


def _region(x, y, grid: UniformGrid2D) -> str:
    xm = grid.x0 + 0.5 * grid.lx
    ym = grid.y0 + 0.5 * grid.ly
    return ("B" if y < ym else "T") + ("L" if x < xm else "R")


def find_vortices(psi: ScalarField) -> list:
    """Local extrema of ``psi`` over interior 3x3 neighbourhoods.

    The extremum with the largest ``|psi|`` is labelled ``"primary"``.  The
    others are grouped by quadrant (``"BL"``, ``"BR"``, ``"TL"``, ``"TR"``)
    and ranked by ``|psi|`` as ``"secondary"``, ``"tertiary"``, then
    ``"minor"``.
    """
    g = psi.grid
    v = np.asarray(psi.values)
    ny, nx = v.shape
    found = []
    for j in range(1, ny - 1):
        for i in range(1, nx - 1):
            blk = v[j - 1:j + 2, i - 1:i + 2]
            c = v[j, i]
            flat = blk.ravel()
            # ties go to the first node of a plateau in scan order
            before, after = flat[:4], flat[5:]
            is_max = np.all(c > before) and np.all(c >= after)
            is_min = np.all(c < before) and np.all(c <= after)
            if not (is_max or is_min):
                continue
            xn, yn = float(g.x[i]), float(g.y[j])
            fit = _paraboloid_fit(blk, g.h, g.k)
            if fit is None:
                val, x, y = float(c), xn, yn
            else:
                val, x, y = fit[0], xn + fit[1], yn + fit[2]
            found.append([val, x, y, i, j, xn, yn])
    if not found:
        return []
    found.sort(key=lambda r: -abs(r[0]))
    out = []
    rank: dict = {}
    names = ("secondary", "tertiary")
    for n, (val, x, y, i, j, xn, yn) in enumerate(found):
        region = _region(xn, yn, g)
        if n == 0:
            kind = "primary"
        else:
            r = rank.get(region, 0)
            rank[region] = r + 1
            kind = names[r] if r < len(names) else "minor"
        out.append(Vortex(val, x, y, kind, region, i, j, xn, yn))
    return out
