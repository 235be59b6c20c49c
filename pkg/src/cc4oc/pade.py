"""Fourth-order compact (Pade) first derivatives along grid lines.

Interior nodes satisfy

    (1/6) f'_{i-1} + (2/3) f'_i + (1/6) f'_{i+1} = (f_{i+1} - f_{i-1}) / (2h)

and each line end is closed in one of three ways (see :class:`End`).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .grid import BoundarySpec, Dirichlet, FieldFunction, ScalarField, UniformGrid2D
from .linalg import CyclicTridiagonalFactor, TridiagonalFactor


class End(enum.Enum):
    EXACT = "exact"          # derivative value supplied by a function
    ONE_SIDED = "one_sided"  # third-order compact end relation
    PERIODIC = "periodic"


@dataclass(frozen=True)
class DerivativeClosure:
    low: End
    high: End
    low_value: Optional[FieldFunction] = None
    high_value: Optional[FieldFunction] = None

    def __post_init__(self):
        if (self.low is End.PERIODIC) != (self.high is End.PERIODIC):
            raise ValueError("periodic closure must apply to both line ends")
        for end, fn, name in ((self.low, self.low_value, "low"),
                              (self.high, self.high_value, "high")):
            if end is End.EXACT and fn is None:
                raise ValueError(f"exact closure at {name} end needs a derivative function")

    @classmethod
    def exact(cls, derivative: FieldFunction) -> "DerivativeClosure":
        return cls(End.EXACT, End.EXACT, derivative, derivative)

    @classmethod
    def one_sided(cls) -> "DerivativeClosure":
        return cls(End.ONE_SIDED, End.ONE_SIDED)

    @classmethod
    def periodic(cls) -> "DerivativeClosure":
        return cls(End.PERIODIC, End.PERIODIC)

    @property
    def is_periodic(self) -> bool:
        return self.low is End.PERIODIC


def closure_from_bc(bc: BoundarySpec, axis: str) -> DerivativeClosure:
    """Closure for the ``x`` or ``y`` derivative implied by ``bc``."""
    if axis == "x":
        lo, hi, attr = bc.left, bc.right, "dx"
    elif axis == "y":
        lo, hi, attr = bc.bottom, bc.top, "dy"
    else:
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    if not isinstance(lo, Dirichlet):
        return DerivativeClosure.periodic()

    def end(edge):
        fn = getattr(edge, attr)
        return (End.ONE_SIDED, None) if fn is None else (End.EXACT, fn)

    (le, lf), (he, hf) = end(lo), end(hi)
    return DerivativeClosure(le, he, lf, hf)


@lru_cache(maxsize=64)
def _factor(n: int, low: End, high: End):
    if low is End.PERIODIC:
        m = n - 1
        return CyclicTridiagonalFactor(np.full(m, 1 / 6), np.full(m, 2 / 3),
                                       np.full(m, 1 / 6), 1 / 6, 1 / 6)
    lower = np.full(n, 1 / 6)
    diag = np.full(n, 2 / 3)
    upper = np.full(n, 1 / 6)
    diag[0] = diag[-1] = 1.0
    upper[0] = 2.0 if low is End.ONE_SIDED else 0.0
    lower[-1] = 2.0 if high is End.ONE_SIDED else 0.0
    return TridiagonalFactor(lower, diag, upper)


def derivative_lines(f: np.ndarray, spacing: float, low: End, high: End,
                     low_values=None, high_values=None) -> np.ndarray:
    """Pade derivative of ``f`` along axis 0, every column an independent line.

    For a periodic line the last entry duplicates the first and is copied
    back into the result.  ``low_values``/``high_values`` are the end
    derivatives for :attr:`End.EXACT` ends (scalars or one per column).
    """
    f = np.asarray(f, dtype=float)
    n = f.shape[0]
    if low is End.PERIODIC:
        if n < 4:
            raise ValueError("periodic line needs at least 4 nodes")
        core = f[:-1]
        rhs = (np.roll(core, -1, axis=0) - np.roll(core, 1, axis=0)) / (2 * spacing)
        out = np.empty_like(f)
        out[:-1] = _factor(n, low, high).solve(rhs)
        out[-1] = out[0]
        return out
    if n < 3 or (n < 4 and End.ONE_SIDED in (low, high)):
        raise ValueError(f"line of {n} nodes too short for closure {low.value}/{high.value}")
    rhs = np.empty_like(f)
    rhs[1:-1] = (f[2:] - f[:-2]) / (2 * spacing)
    if low is End.EXACT:
        rhs[0] = low_values
    else:
        rhs[0] = (-2.5 * f[0] + 2.0 * f[1] + 0.5 * f[2]) / spacing
    if high is End.EXACT:
        rhs[-1] = high_values
    else:
        rhs[-1] = (2.5 * f[-1] - 2.0 * f[-2] - 0.5 * f[-3]) / spacing
    return _factor(n, low, high).solve(rhs)


def _end_values(fn, x, y, t):
    if fn is None:
        return None
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    return np.broadcast_to(np.asarray(fn(x, y, t), dtype=float), x.shape)


def dx_array(values: np.ndarray, grid: UniformGrid2D, closure: DerivativeClosure,
             t: float = 0.0) -> np.ndarray:
    """:func:`pade_dx` on a bare ``(ny, nx)`` array."""
    lv = _end_values(closure.low_value, grid.x[0], grid.y, t)
    hv = _end_values(closure.high_value, grid.x[-1], grid.y, t)
    return derivative_lines(values.T, grid.h, closure.low, closure.high, lv, hv).T


def dy_array(values: np.ndarray, grid: UniformGrid2D, closure: DerivativeClosure,
             t: float = 0.0) -> np.ndarray:
    """:func:`pade_dy` on a bare ``(ny, nx)`` array."""
    lv = _end_values(closure.low_value, grid.x, grid.y[0], t)
    hv = _end_values(closure.high_value, grid.x, grid.y[-1], t)
    return derivative_lines(values, grid.k, closure.low, closure.high, lv, hv)


def pade_dx(field: ScalarField, closure: DerivativeClosure, t: float = 0.0) -> ScalarField:
    """Fourth-order compact x-derivative, one tridiagonal solve per grid row."""
    return ScalarField(field.grid, dx_array(field.values, field.grid, closure, t))


def pade_dy(field: ScalarField, closure: DerivativeClosure, t: float = 0.0) -> ScalarField:
    """Fourth-order compact y-derivative, one tridiagonal solve per grid column."""
    return ScalarField(field.grid, dy_array(field.values, field.grid, closure, t))
