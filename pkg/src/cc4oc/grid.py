"""Uniform node-centred grids, nodal fields and boundary descriptions.

Fields are stored as ``(ny, nx)`` arrays in C order, so the flattened values
run over ``i`` fastest (row-major by ``j`` then ``i``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

FieldFunction = Callable[[np.ndarray, np.ndarray, float], np.ndarray]


class SamplingError(ValueError):
    """A sampled function returned a non-finite value."""


@dataclass(frozen=True)
class UniformGrid2D:
    """Rectangular grid of ``nx`` by ``ny`` nodes, boundary nodes included."""

    nx: int
    ny: int
    x0: float = 0.0
    y0: float = 0.0
    lx: float = 1.0
    ly: float = 1.0

    def __post_init__(self):
        if int(self.nx) != self.nx or int(self.ny) != self.ny:
            raise ValueError("node counts must be integers")
        if self.nx < 3 or self.ny < 3:
            raise ValueError(
                f"need at least 3 nodes per direction, got {self.nx}x{self.ny}")
        if not (self.lx > 0 and self.ly > 0):
            raise ValueError(f"domain extents must be positive, got {self.lx}, {self.ly}")

    @property
    def h(self) -> float:
        return self.lx / (self.nx - 1)

    @property
    def k(self) -> float:
        return self.ly / (self.ny - 1)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ny, self.nx)

    @property
    def size(self) -> int:
        return self.nx * self.ny

    @property
    def x(self) -> np.ndarray:
        return self.x0 + np.arange(self.nx) * self.h

    @property
    def y(self) -> np.ndarray:
        return self.y0 + np.arange(self.ny) * self.k

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Coordinate arrays ``X, Y`` of shape ``(ny, nx)``."""
        return np.meshgrid(self.x, self.y)

    def index(self, i: int, j: int) -> int:
        if not (0 <= i < self.nx and 0 <= j < self.ny):
            raise IndexError(f"node ({i}, {j}) outside {self.nx}x{self.ny} grid")
        return j * self.nx + i

    def node_coords(self, index: int) -> tuple[float, float]:
        j, i = divmod(index, self.nx)
        return (self.x0 + i * self.h, self.y0 + j * self.k)


def make_grid(nx: int, ny: int, x0: float = 0.0, y0: float = 0.0,
              lx: float = 1.0, ly: float = 1.0) -> UniformGrid2D:
    return UniformGrid2D(nx, ny, x0, y0, lx, ly)


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Nodal values of one quantity on a grid.

    ``values`` has shape ``(ny, nx)``; ``values[j, i]`` lives at
    ``(x_i, y_j)``.  The array is marked read-only on construction.
    """

    grid: UniformGrid2D
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.size != self.grid.size:
            raise ValueError(
                f"field has {v.size} values, grid has {self.grid.size} nodes")
        v = v.reshape(self.grid.shape)
        if not np.all(np.isfinite(v)):
            raise ValueError("field contains non-finite values")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def flat(self) -> np.ndarray:
        return self.values.ravel()

    def __getitem__(self, ij: tuple[int, int]) -> float:
        i, j = ij
        return float(self.values[j, i])


def sample(grid: UniformGrid2D, f: FieldFunction, t: float = 0.0) -> ScalarField:
    """Evaluate ``f(x, y, t)`` at every node.

    ``f`` is called once with broadcast coordinate arrays; scalar returns
    are broadcast to the full grid.
    """
    X, Y = grid.mesh()
    with np.errstate(all="ignore"):
        v = np.broadcast_to(np.asarray(f(X, Y, t), dtype=float), grid.shape)
    bad = ~np.isfinite(v)
    if bad.any():
        j, i = map(int, np.argwhere(bad)[0])
        raise SamplingError(
            f"non-finite value {v[j, i]} at node ({i}, {j}) = "
            f"({X[j, i]:.6g}, {Y[j, i]:.6g}), t = {t}")
    return ScalarField(grid, v.copy())


# -- boundary descriptions ---------------------------------------------------

@dataclass(frozen=True)
class Dirichlet:
    """Prescribed ``phi`` on an edge, optionally with its first derivatives.

    Without derivative functions the Pade solves fall back to one-sided
    compact closures at that edge.
    """

    value: FieldFunction
    dx: Optional[FieldFunction] = None
    dy: Optional[FieldFunction] = None


@dataclass(frozen=True)
class Periodic:
    pass


PERIODIC = Periodic()
EdgeCondition = Union[Dirichlet, Periodic]


@dataclass(frozen=True)
class BoundarySpec:
    """Per-edge treatment of a transported field."""

    left: EdgeCondition
    right: EdgeCondition
    bottom: EdgeCondition
    top: EdgeCondition

    def __post_init__(self):
        for a, b, name in ((self.left, self.right, "left/right"),
                           (self.bottom, self.top, "bottom/top")):
            if isinstance(a, Periodic) != isinstance(b, Periodic):
                raise ValueError(f"periodic edges must be paired ({name})")

    @classmethod
    def dirichlet(cls, value: FieldFunction, dx: Optional[FieldFunction] = None,
                  dy: Optional[FieldFunction] = None) -> "BoundarySpec":
        e = Dirichlet(value, dx, dy)
        return cls(e, e, e, e)

    @classmethod
    def periodic(cls) -> "BoundarySpec":
        return cls(PERIODIC, PERIODIC, PERIODIC, PERIODIC)

    @property
    def periodic_x(self) -> bool:
        return isinstance(self.left, Periodic)

    @property
    def periodic_y(self) -> bool:
        return isinstance(self.bottom, Periodic)

    def edge_values(self, grid: UniformGrid2D, t: float,
                    out: Optional[np.ndarray] = None) -> np.ndarray:
        """Array of shape ``grid.shape`` holding Dirichlet data on the edges.

        Interior entries (and periodic edges) are left untouched in ``out``
        or zero in a fresh array.
        """
        out = np.zeros(grid.shape) if out is None else out
        x, y = grid.x, grid.y
        if not self.periodic_x:
            out[:, 0] = _edge(self.left.value, x[0], y, t)
            out[:, -1] = _edge(self.right.value, x[-1], y, t)
        if not self.periodic_y:
            out[0, :] = _edge(self.bottom.value, x, y[0], t)
            out[-1, :] = _edge(self.top.value, x, y[-1], t)
        return out


def _edge(f: FieldFunction, x, y, t) -> np.ndarray:
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    return np.broadcast_to(np.asarray(f(x, y, t), dtype=float), x.shape)
