from __future__ import annotations

from typing import Protocol, Tuple

import numpy as np
from scipy.optimize import bisect

from src.functionals import hj_operator_arrays
from src.grid import Grid, ScalarField, VectorField
from src.model import CouplingFamily, ModelSpec
from src.solver import SolutionBundle
from src.solver.time_dependent import complementarity

from .exceptions import GridMismatch, WrongFamily

ORACLE_XTOL = 1e-12


class StationaryPoint(Protocol):
    lam: float
    phi: np.ndarray
    m: np.ndarray
    w: np.ndarray


def _require_explicit_family(model: ModelSpec) -> None:
    if model.r != 2.0:
        raise WrongFamily(f"closed-form ergodic solution needs r = 2, got r = {model.r:g}")
    if not np.allclose(model.hamiltonian.weight, 1.0):
        raise WrongFamily("closed-form ergodic solution needs c = 1")
    if model.coupling.family is not CouplingFamily.POWER:
        raise WrongFamily("closed-form ergodic solution needs a power coupling with f(x, 0) = 0")


def normalised_density(model: ModelSpec, lam: float) -> np.ndarray:
    """xi(x, lam) = f^{-1}(x, (lam - V(x))_+)."""
    return model.coupling.f_inverse(np.maximum(lam - model.hamiltonian.potential, 0.0))


def explicit_ergodic_oracle(model: ModelSpec, grid: Grid) -> Tuple[float, np.ndarray]:
    """Ergodic pair (lambda-bar, m-bar) for H = |p|^2/2 - V and a power coupling, with D phi-bar = 0.

    lambda-bar is the root of lam -> sum xi(x, lam) h_x^d = 1, a nondecreasing
    map, found by bisection between min V (zero mass) and a level where every
    cell already carries density 2.
    """
    _require_explicit_family(model)
    if model.m0.shape != grid.spatial_shape:
        raise GridMismatch(f"model lives on {model.m0.shape}, grid on {grid.spatial_shape}")
    potential = model.hamiltonian.potential
    saturated = np.full(grid.spatial_shape, 2.0)
    low = float(np.min(potential)) - 1.0
    high = float(np.max(potential)) + float(np.max(model.f(saturated)))

    def excess_mass(lam: float) -> float:
        return float(np.sum(normalised_density(model, lam))) * grid.cell_volume - 1.0

    lam = bisect(excess_mass, low, high, xtol=ORACLE_XTOL, maxiter=200)
    return float(lam), normalised_density(model, lam)


def stationary_bundle(ergodic: StationaryPoint, model: ModelSpec, grid: Grid) -> SolutionBundle:
    """Time-dependent pair phi(t, x) = phi-bar(x) + lambda-bar (T - t), m = m-bar, w = w-bar on ``grid``."""
    phi_bar = np.asarray(ergodic.phi, dtype=float)
    if phi_bar.shape != grid.spatial_shape:
        raise GridMismatch(f"ergodic solution lives on {phi_bar.shape}, grid on {grid.spatial_shape}")
    remaining = grid.horizon - grid.node_times()
    phi = phi_bar[None] + ergodic.lam * remaining.reshape((-1,) + (1,) * grid.d)
    m = np.broadcast_to(np.asarray(ergodic.m, dtype=float), grid.cell_shape()).copy()
    w = np.broadcast_to(np.asarray(ergodic.w, dtype=float), grid.flux_shape()).copy()
    alpha = hj_operator_arrays(phi, model, grid)
    return SolutionBundle(
        grid=grid,
        phi=ScalarField.nodes(grid, phi),
        alpha=ScalarField.cells(grid, alpha),
        m=ScalarField.cells(grid, m),
        w=VectorField(grid=grid, values=w),
        iterations=0,
        converged=True,
        complementarity=complementarity(alpha, m, model, grid),
    )
