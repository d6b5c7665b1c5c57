from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Tuple

import numpy as np

from .exceptions import FieldShapeError


class Placement(str, Enum):
    """Where a scalar field lives along the time axis."""

    TIME_NODE = "time-node"
    TIME_CELL = "time-cell"


@dataclass(frozen=True, slots=True)
class Grid:
    """Uniform space-time grid on [0, T] x T^d with unit torus side.

    Spatial points sit at x_i = i * h_x, i = 0..n_x-1 on every axis; index
    arithmetic along each spatial axis is modulo n_x. Time nodes are
    t_k = k * h_t, k = 0..n_t, and time cell k spans [t_k, t_{k+1}].
    """

    d: int
    n_x: int
    n_t: int
    horizon: float

    def __post_init__(self) -> None:
        if self.d not in (1, 2):
            raise ValueError(f"spatial dimension must be 1 or 2, got {self.d}")
        if self.n_x < 2:
            raise ValueError(f"n_x must be >= 2, got {self.n_x}")
        if self.n_t < 1:
            raise ValueError(f"n_t must be >= 1, got {self.n_t}")
        if not self.horizon > 0:
            raise ValueError(f"horizon must be > 0, got {self.horizon}")

    @property
    def h_x(self) -> float:
        return 1.0 / self.n_x

    @property
    def h_t(self) -> float:
        return self.horizon / self.n_t

    @property
    def cell_volume(self) -> float:
        """Spatial quadrature weight h_x^d."""
        return self.h_x**self.d

    @property
    def spatial_shape(self) -> Tuple[int, ...]:
        return (self.n_x,) * self.d

    def node_shape(self) -> Tuple[int, ...]:
        return (self.n_t + 1, *self.spatial_shape)

    def cell_shape(self) -> Tuple[int, ...]:
        return (self.n_t, *self.spatial_shape)

    def flux_shape(self) -> Tuple[int, ...]:
        return (self.n_t, self.d, *self.spatial_shape)

    def shape_for(self, placement: Placement) -> Tuple[int, ...]:
        if placement is Placement.TIME_NODE:
            return self.node_shape()
        return self.cell_shape()

    def node_times(self) -> np.ndarray:
        return np.arange(self.n_t + 1) * self.h_t

    def cell_times(self) -> np.ndarray:
        """Midpoints of the time cells."""
        return (np.arange(self.n_t) + 0.5) * self.h_t

    def coordinates(self) -> Tuple[np.ndarray, ...]:
        """Meshgrid of spatial point coordinates, one array per axis."""
        axis = np.arange(self.n_x) * self.h_x
        return tuple(np.meshgrid(*([axis] * self.d), indexing="ij"))

    def with_time(self, n_t: int, horizon: float) -> "Grid":
        """Same spatial discretisation, different time partition."""
        return Grid(d=self.d, n_x=self.n_x, n_t=n_t, horizon=horizon)

    def same_as(self, other: "Grid") -> bool:
        return (
            self.d == other.d
            and self.n_x == other.n_x
            and self.n_t == other.n_t
            and np.isclose(self.horizon, other.horizon, rtol=0.0, atol=1e-14)
        )


@dataclass(frozen=True, slots=True)
class ScalarField:
    """Real values on time nodes or time cells times the spatial points."""

    grid: Grid
    placement: Placement
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        expected = self.grid.shape_for(self.placement)
        if values.shape != expected:
            raise FieldShapeError(
                f"{self.placement.value} field expects shape {expected}, got {values.shape}"
            )
        object.__setattr__(self, "values", values)

    @classmethod
    def nodes(cls, grid: Grid, values: np.ndarray) -> "ScalarField":
        return cls(grid=grid, placement=Placement.TIME_NODE, values=values)

    @classmethod
    def cells(cls, grid: Grid, values: np.ndarray) -> "ScalarField":
        return cls(grid=grid, placement=Placement.TIME_CELL, values=values)


@dataclass(frozen=True, slots=True)
class VectorField:
    """Fluxes on the staggered spatial faces inside each time cell.

    Component i at index (k, i, x) is the flux through the face between x
    and x + e_i during time cell k.
    """

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        expected = self.grid.flux_shape()
        if values.shape != expected:
            raise FieldShapeError(
                f"vector field expects shape {expected}, got {values.shape}"
            )
        object.__setattr__(self, "values", values)

    @property
    def components(self) -> int:
        return self.values.shape[1]
