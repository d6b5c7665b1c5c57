from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from src.grid import FieldShapeError, Grid, Placement, ScalarField, VectorField


@dataclass(frozen=True, slots=True)
class PrimalState:
    """Relaxed primal pair (phi on time nodes, alpha on time cells)."""

    phi: ScalarField
    alpha: ScalarField

    def __post_init__(self) -> None:
        if self.phi.placement is not Placement.TIME_NODE:
            raise FieldShapeError("phi must live on time nodes")
        if self.alpha.placement is not Placement.TIME_CELL:
            raise FieldShapeError("alpha must live on time cells")
        if not self.phi.grid.same_as(self.alpha.grid):
            raise FieldShapeError("phi and alpha live on different grids")

    @property
    def grid(self) -> Grid:
        return self.phi.grid


@dataclass(frozen=True, slots=True)
class DualState:
    """Density-flux pair (m on time cells, w on staggered faces)."""

    m: ScalarField
    w: VectorField

    def __post_init__(self) -> None:
        if self.m.placement is not Placement.TIME_CELL:
            raise FieldShapeError("m must live on time cells")
        if not self.m.grid.same_as(self.w.grid):
            raise FieldShapeError("m and w live on different grids")

    @property
    def grid(self) -> Grid:
        return self.m.grid


@dataclass(frozen=True, slots=True)
class ErgodicState:
    """Stationary quadruple: ergodic constant, potential, density and flux on the torus."""

    lam: float
    phi: np.ndarray = field(repr=False)
    m: np.ndarray = field(repr=False)
    w: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        phi = np.asarray(self.phi, dtype=float)
        m = np.asarray(self.m, dtype=float)
        w = np.asarray(self.w, dtype=float)
        if phi.shape != m.shape or w.shape != (m.ndim, *m.shape):
            raise FieldShapeError(
                f"inconsistent ergodic shapes phi={phi.shape} m={m.shape} w={w.shape}"
            )
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "w", w)
