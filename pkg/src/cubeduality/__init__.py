"""Bellman functions, sharp square-function constants and their Hamming-cube duals."""

from .bellman import AlphaContext, U, make_context, verify_bellman_grid
from .cube import CubeFunction, CubeSubset, s_alpha, sigma_exhaustive
from .duality import dual_M, saddle_solve
from .errors import (
    CoercivityError,
    ConvexityError,
    DimensionError,
    NumericalFailure,
    ProximityError,
    TruncationError,
    ZeroNotFoundError,
)
from .specfun import eval_N, smallest_zero

__all__ = [
    "AlphaContext",
    "CoercivityError",
    "ConvexityError",
    "CubeFunction",
    "CubeSubset",
    "DimensionError",
    "NumericalFailure",
    "ProximityError",
    "TruncationError",
    "U",
    "ZeroNotFoundError",
    "dual_M",
    "eval_N",
    "make_context",
    "s_alpha",
    "saddle_solve",
    "sigma_exhaustive",
    "smallest_zero",
    "verify_bellman_grid",
]
