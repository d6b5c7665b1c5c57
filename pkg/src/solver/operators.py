"""Linear space-time operators of the two saddle problems and their adjoints.

Inner products are the quadrature-weighted ones (h_t h_x^d on cells and
nodes, h_x^d on the torus, weight 1 on the ergodic constant), so the
adjoints below are exact transposes for those products.
"""

from __future__ import annotations

import math
from typing import Tuple

import numpy as np

from src.grid import Grid, spatial_divergence, spatial_gradient


def apply_space_time(phi: np.ndarray, grid: Grid) -> Tuple[np.ndarray, np.ndarray]:
    """K phi = (d_t phi per cell, D phi at the earlier node of the cell)."""
    a = np.diff(phi, axis=0) / grid.h_t
    b = spatial_gradient(phi[:-1], grid.d, grid.h_x)
    return a, b


def adjoint_space_time(y_a: np.ndarray, y_b: np.ndarray, grid: Grid) -> np.ndarray:
    """K^T (y_a, y_b) on all time nodes.

    Node j receives (y_a[j-1] - y_a[j]) / h_t - div y_b[j], with the
    missing neighbours of the first and last node read as zero.
    """
    out = np.zeros((grid.n_t + 1, *grid.spatial_shape))
    out[1:] += y_a / grid.h_t
    out[:-1] -= y_a / grid.h_t
    out[:-1] -= spatial_divergence(y_b, grid.d, grid.h_x)
    return out


def lambda_scale(grid: Grid) -> float:
    """Scaling of the ergodic-constant channel, matched to ||D|| <= 2 sqrt(d) / h_x."""
    return 2.0 * math.sqrt(grid.d) / grid.h_x


def apply_ergodic(
    lam_scaled: float, phi: np.ndarray, grid: Grid, kappa: float
) -> Tuple[np.ndarray, np.ndarray]:
    a = np.full(grid.spatial_shape, kappa * lam_scaled)
    b = spatial_gradient(phi, grid.d, grid.h_x)
    return a, b


def adjoint_ergodic(
    y_a: np.ndarray, y_b: np.ndarray, grid: Grid, kappa: float
) -> Tuple[float, np.ndarray]:
    lam_part = kappa * float(np.sum(y_a)) * grid.cell_volume
    return lam_part, -spatial_divergence(y_b, grid.d, grid.h_x)


def _power_method(apply_normal, norm, x: np.ndarray, max_iters: int, rtol: float) -> float:
    estimate = 0.0
    x = x / norm(x)
    for _ in range(max_iters):
        z = apply_normal(x)
        size = norm(z)
        if size == 0.0:
            return 0.0
        previous, estimate = estimate, math.sqrt(size)
        x = z / size
        if previous > 0.0 and abs(estimate - previous) <= rtol * estimate:
            break
    return estimate


def estimate_operator_norm(
    grid: Grid,
    ergodic: bool = False,
    max_iters: int = 50,
    rtol: float = 1e-6,
    seed: int = 0,
) -> float:
    """Power-method estimate of ||K|| for the time-dependent or ergodic operator."""
    rng = np.random.default_rng(seed)
    if not ergodic:
        weight = grid.h_t * grid.cell_volume

        def normal(x: np.ndarray) -> np.ndarray:
            z = adjoint_space_time(*apply_space_time(x, grid), grid)
            z[-1] = 0.0  # terminal node is fixed
            return z

        x0 = rng.standard_normal((grid.n_t + 1, *grid.spatial_shape))
        x0[-1] = 0.0
        return _power_method(
            normal, lambda v: math.sqrt(weight * float(np.sum(v * v))), x0, max_iters, rtol
        )

    kappa = lambda_scale(grid)
    size = int(np.prod(grid.spatial_shape))

    def normal_flat(x: np.ndarray) -> np.ndarray:
        phi = x[1:].reshape(grid.spatial_shape)
        lam_part, phi_part = adjoint_ergodic(*apply_ergodic(x[0], phi, grid, kappa), grid, kappa)
        return np.concatenate([[lam_part], phi_part.ravel()])

    def weighted(v: np.ndarray) -> float:
        return math.sqrt(v[0] ** 2 + grid.cell_volume * float(np.sum(v[1:] ** 2)))

    return _power_method(normal_flat, weighted, rng.standard_normal(size + 1), max_iters, rtol)
