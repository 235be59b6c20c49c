"""Implicit fourth-order compact schemes for 2D unsteady convection-diffusion
and stream function-vorticity Navier-Stokes."""
from .grid import (BoundarySpec, Dirichlet, Periodic, ScalarField, UniformGrid2D,
                   make_grid, sample)
from .scheme import (Coefficients, SchemeConfig, StabilityWarning, TransportState,
                     advance, march, solve_steady)

__version__ = "0.1.0"

__all__ = [
    "BoundarySpec", "Coefficients", "Dirichlet", "Periodic", "ScalarField",
    "SchemeConfig", "StabilityWarning", "TransportState", "UniformGrid2D",
    "advance", "make_grid", "march", "sample", "solve_steady",
]
