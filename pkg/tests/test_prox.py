from __future__ import annotations

import numpy as np
import pytest

from src.grid import Grid
from src.model import CouplingFamily
from src.solver import InnerProxFailure, moreau_dual_point, prox_primal_point

CASES = [
    (2.0, 2.0, CouplingFamily.POWER),
    (3.0, 1.5, CouplingFamily.POWER),
    (1.5, 3.0, CouplingFamily.POWER),
    (2.0, None, CouplingFamily.LOG),
]


def _kkt(model, a, b, a_new, b_new, step):
    alpha = -a_new + model.H(b_new)
    multiplier = model.F_star_subgradient(alpha)
    scalar = (a_new - a) / step - multiplier
    axis = model.component_axis()
    vector = (b_new - b) / step + np.expand_dims(multiplier, axis) * model.DpH(b_new)
    return scalar, vector, multiplier


@pytest.mark.parametrize("r, q, family", CASES)
@pytest.mark.parametrize("step", [0.05, 1.0, 20.0])
def test_prox_satisfies_optimality_conditions(model_factory, rng, r, q, family, step) -> None:
    grid = Grid(d=2, n_x=6, n_t=3, horizon=1.0)
    model = model_factory(
        grid,
        r=r,
        q=q,
        family=family,
        potential=rng.uniform(-1.0, 1.0, grid.spatial_shape),
        hamiltonian_weight=rng.uniform(0.5, 2.0, grid.spatial_shape),
    )
    a = rng.uniform(-2.0, 2.0, grid.cell_shape())
    b = rng.uniform(-2.0, 2.0, grid.flux_shape())

    a_new, b_new = prox_primal_point(a, b, step, model)
    scalar, vector, multiplier = _kkt(model, a, b, a_new, b_new, step)

    assert np.all(multiplier >= 0.0)
    assert np.max(np.abs(scalar) / (1.0 + multiplier)) <= 1e-7
    slope = np.linalg.norm(model.DpH(b_new), axis=model.component_axis())
    bound = 1e-7 * (1.0 + multiplier) * (1.0 + slope) + 1e-8 * (1.0 + np.linalg.norm(b, axis=model.component_axis())) / step
    assert np.all(np.linalg.norm(vector, axis=model.component_axis()) <= bound)


def test_prox_with_zero_gradient_keeps_direction(model_factory, small_grid) -> None:
    model = model_factory(small_grid)
    a = np.full(small_grid.cell_shape(), -3.0)
    b = np.zeros(small_grid.flux_shape())
    a_new, b_new = prox_primal_point(a, b, 0.5, model)
    assert np.all(b_new == 0.0)
    # alpha = 3 - 0.5 mu must equal mu for f(m) = m
    np.testing.assert_allclose((a_new - a) / 0.5, 2.0, rtol=1e-10)


def test_prox_on_flat_branch_is_identity_in_a(model_factory, small_grid) -> None:
    model = model_factory(small_grid)
    a = np.full(small_grid.cell_shape(), 5.0)
    b = np.full(small_grid.flux_shape(), 0.1)
    a_new, b_new = prox_primal_point(a, b, 1.0, model)
    np.testing.assert_array_equal(a_new, a)
    np.testing.assert_array_equal(b_new, b)


def test_pointwise_prox_matches_vectorised(model_factory, rng) -> None:
    grid = Grid(d=1, n_x=5, n_t=2, horizon=1.0)
    model = model_factory(grid, r=3.0, q=1.5, potential=rng.uniform(-1.0, 1.0, grid.spatial_shape))
    a = rng.uniform(-2.0, 2.0, grid.cell_shape())
    b = rng.uniform(-2.0, 2.0, grid.flux_shape())
    a_all, b_all = prox_primal_point(a, b, 0.7, model)
    a_one, b_one = prox_primal_point(a[1, 3], b[1, :, 3], 0.7, model, x=3)
    assert float(a_one) == pytest.approx(a_all[1, 3], rel=1e-9, abs=1e-12)
    np.testing.assert_allclose(b_one, b_all[1, :, 3], rtol=1e-9, atol=1e-12)


def test_prox_rejects_nonpositive_step(reference_model, small_grid) -> None:
    with pytest.raises(ValueError):
        prox_primal_point(np.zeros(small_grid.cell_shape()), np.zeros(small_grid.flux_shape()), 0.0, reference_model)


def test_prox_reports_inner_failure(model_factory, rng) -> None:
    grid = Grid(d=1, n_x=8, n_t=2, horizon=1.0)
    model = model_factory(grid, r=3.0, q=1.5)
    a = rng.uniform(-4.0, -1.0, grid.cell_shape())
    b = rng.uniform(1.0, 2.0, grid.flux_shape())
    with pytest.raises(InnerProxFailure):
        prox_primal_point(a, b, 1.0, model, max_iters=1)


@pytest.mark.parametrize("r, q, family", CASES)
def test_dual_point_follows_moreau_identity(model_factory, rng, r, q, family) -> None:
    grid = Grid(d=1, n_x=8, n_t=4, horizon=1.0)
    model = model_factory(grid, r=r, q=q, family=family)
    tau = 0.3
    v_a = rng.uniform(-1.0, 1.0, grid.cell_shape())
    v_b = rng.uniform(-0.5, 0.5, grid.flux_shape())
    y_a, y_b = moreau_dual_point(v_a, v_b, tau, model)
    p_a, p_b = prox_primal_point(v_a / tau, v_b / tau, 1.0 / tau, model)
    np.testing.assert_allclose(y_a, v_a - tau * p_a, atol=1e-9)
    np.testing.assert_allclose(y_b, v_b - tau * p_b, atol=1e-9)
    assert np.all(y_a <= 0.0)


def test_dual_point_has_no_flux_without_density(reference_model, small_grid, rng) -> None:
    v_a = np.full(small_grid.cell_shape(), 5.0)
    v_b = rng.uniform(-0.5, 0.5, small_grid.flux_shape())
    y_a, y_b = moreau_dual_point(v_a, v_b, 1.0, reference_model)
    assert np.all(y_a == 0.0)
    assert np.all(y_b == 0.0)


@pytest.mark.parametrize("r, q, family", CASES)
def test_prox_is_nonexpansive(model_factory, rng, r, q, family) -> None:
    grid = Grid(d=2, n_x=5, n_t=3, horizon=1.0)
    model = model_factory(grid, r=r, q=q, family=family, potential=rng.uniform(-1.0, 1.0, grid.spatial_shape))
    a1, a2 = rng.uniform(-2.0, 2.0, (2, *grid.cell_shape()))
    b1, b2 = rng.uniform(-2.0, 2.0, (2, *grid.flux_shape()))
    p_a1, p_b1 = prox_primal_point(a1, b1, 0.7, model)
    p_a2, p_b2 = prox_primal_point(a2, b2, 0.7, model)

    axis = model.component_axis()
    before = np.sqrt((a1 - a2) ** 2 + np.sum((b1 - b2) ** 2, axis=axis))
    after = np.sqrt((p_a1 - p_a2) ** 2 + np.sum((p_b1 - p_b2) ** 2, axis=axis))
    assert np.all(after <= before + 1e-8)
