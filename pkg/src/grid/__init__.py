"""Torus space-time grids and staggered difference operators."""

from .exceptions import FieldPlacementError, FieldShapeError
from .fields import Grid, Placement, ScalarField, VectorField
from .operators import (
    ContinuityResidual,
    continuity_residual,
    continuity_residual_arrays,
    discrete_divergence,
    discrete_gradient,
    inner,
    spatial_divergence,
    spatial_gradient,
    time_derivative,
)

__all__ = [
    "Grid",
    "Placement",
    "ScalarField",
    "VectorField",
    "ContinuityResidual",
    "continuity_residual",
    "continuity_residual_arrays",
    "discrete_divergence",
    "discrete_gradient",
    "inner",
    "spatial_divergence",
    "spatial_gradient",
    "time_derivative",
    "FieldPlacementError",
    "FieldShapeError",
]
