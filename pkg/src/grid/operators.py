"""Periodic finite-difference operators on the staggered space-time grid.

The spatial gradient is a forward difference and the divergence a backward
difference, so that sum(grad(phi) * w) == -sum(phi * div(w)) holds exactly
for every pair of arrays. All array helpers act on the trailing d axes and
keep any leading (time) axes untouched.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import FieldPlacementError, FieldShapeError
from .fields import Grid, Placement, ScalarField, VectorField


def spatial_gradient(values: np.ndarray, d: int, h: float) -> np.ndarray:
    """Forward differences with periodic wrap; inserts a component axis before the spatial axes."""
    values = np.asarray(values, dtype=float)
    first = values.ndim - d
    parts = [
        (np.roll(values, -1, axis=first + i) - values) / h for i in range(d)
    ]
    return np.stack(parts, axis=first)


def spatial_divergence(values: np.ndarray, d: int, h: float) -> np.ndarray:
    """Backward-difference divergence, the negative adjoint of spatial_gradient."""
    values = np.asarray(values, dtype=float)
    comp_axis = values.ndim - d - 1
    if values.shape[comp_axis] != d:
        raise FieldShapeError(
            f"expected {d} flux components on axis {comp_axis}, got {values.shape[comp_axis]}"
        )
    out = np.zeros(values.shape[:comp_axis] + values.shape[comp_axis + 1 :])
    first = comp_axis  # spatial axes of the output start here
    for i in range(d):
        component = np.take(values, i, axis=comp_axis)
        out += (component - np.roll(component, 1, axis=first + i)) / h
    return out


def inner(a: np.ndarray, b: np.ndarray) -> float:
    """Unweighted Euclidean pairing with a fixed summation order."""
    return float(np.dot(np.ravel(a), np.ravel(b)))


def discrete_gradient(phi: ScalarField, t_averaging: bool = False) -> VectorField:
    """Staggered spatial gradient of a time-node field, one value per time cell.

    With ``t_averaging`` the two bounding nodes of a cell are averaged before
    differencing; otherwise the earlier node is used, which is the convention
    shared by the functionals and the solvers.
    """
    if phi.placement is not Placement.TIME_NODE:
        raise FieldPlacementError(
            f"discrete_gradient expects a time-node field, got {phi.placement.value}"
        )
    grid = phi.grid
    if t_averaging:
        per_cell = 0.5 * (phi.values[1:] + phi.values[:-1])
    else:
        per_cell = phi.values[:-1]
    return VectorField(grid=grid, values=spatial_gradient(per_cell, grid.d, grid.h_x))


def discrete_divergence(w: VectorField) -> ScalarField:
    grid = w.grid
    return ScalarField.cells(grid, spatial_divergence(w.values, grid.d, grid.h_x))


def time_derivative(phi: ScalarField) -> ScalarField:
    """Node difference quotient (phi_{k+1} - phi_k) / h_t on each time cell."""
    if phi.placement is not Placement.TIME_NODE:
        raise FieldPlacementError(
            f"time_derivative expects a time-node field, got {phi.placement.value}"
        )
    grid = phi.grid
    return ScalarField.cells(grid, np.diff(phi.values, axis=0) / grid.h_t)


@dataclass(frozen=True, slots=True)
class ContinuityResidual:
    """Worst-cell L1 residual of the discrete continuity equation and mass drift."""

    residual: float
    mass_drift: float
    per_cell: np.ndarray


def continuity_residual_arrays(
    m: np.ndarray, w: np.ndarray, m0: np.ndarray, grid: Grid
) -> ContinuityResidual:
    m = np.asarray(m, dtype=float)
    m0 = np.asarray(m0, dtype=float)
    if m0.shape != grid.spatial_shape:
        raise FieldShapeError(
            f"m0 expects shape {grid.spatial_shape}, got {m0.shape}"
        )
    previous = np.concatenate([m0[None], m[:-1]], axis=0)
    pointwise = (m - previous) / grid.h_t + spatial_divergence(w, grid.d, grid.h_x)
    spatial_axes = tuple(range(1, m.ndim))
    per_cell = np.sum(np.abs(pointwise), axis=spatial_axes) * grid.cell_volume
    mass = np.sum(m, axis=spatial_axes) * grid.cell_volume
    return ContinuityResidual(
        residual=float(np.max(per_cell)),
        mass_drift=float(np.max(np.abs(mass - 1.0))),
        per_cell=per_cell,
    )


def continuity_residual(
    m: ScalarField, w: VectorField, m0: np.ndarray
) -> ContinuityResidual:
    """Residual of (m_k - m_{k-1}) / h_t + div w_k with m_{-1} := m0, per time cell."""
    if m.placement is not Placement.TIME_CELL:
        raise FieldPlacementError(
            f"continuity_residual expects a time-cell density, got {m.placement.value}"
        )
    if not m.grid.same_as(w.grid):
        raise FieldShapeError("density and flux live on different grids")
    return continuity_residual_arrays(m.values, w.values, m0, m.grid)
