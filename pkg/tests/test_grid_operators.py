from __future__ import annotations

import numpy as np
import pytest

from src.grid import (
    FieldPlacementError,
    FieldShapeError,
    Grid,
    ScalarField,
    VectorField,
    continuity_residual,
    continuity_residual_arrays,
    discrete_divergence,
    discrete_gradient,
    inner,
    spatial_divergence,
    spatial_gradient,
    time_derivative,
)


@pytest.mark.parametrize("d", [1, 2])
@pytest.mark.parametrize("n_x", [4, 8, 32])
def test_gradient_and_divergence_are_negative_adjoints(d: int, n_x: int) -> None:
    rng = np.random.default_rng(n_x + 10 * d)
    grid = Grid(d=d, n_x=n_x, n_t=3, horizon=1.0)
    phi = ScalarField.nodes(grid, rng.standard_normal(grid.node_shape()))
    w = VectorField(grid=grid, values=rng.standard_normal(grid.flux_shape()))

    grad = discrete_gradient(phi)
    div = discrete_divergence(w)
    lhs = inner(grad.values, w.values)
    rhs = -inner(phi.values[:-1], div.values)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


@pytest.mark.parametrize("d", [1, 2])
@pytest.mark.parametrize("n_x", [4, 8, 32])
def test_divergence_conserves_mass(d: int, n_x: int) -> None:
    rng = np.random.default_rng(7 * n_x + d)
    w = rng.standard_normal((d,) + (n_x,) * d)
    total = float(np.sum(spatial_divergence(w, d, 1.0 / n_x)))
    assert abs(total) <= 1e-12 * n_x**d


def test_sawtooth_gradient_wraps_around() -> None:
    n_x = 4
    h = 1.0 / n_x
    values = np.arange(n_x) * h
    grad = spatial_gradient(values, 1, h)
    assert grad.shape == (1, n_x)
    np.testing.assert_allclose(grad[0, :-1], 1.0)
    assert grad[0, -1] == pytest.approx(-(n_x - 1))


def test_gradient_of_constant_is_zero_in_two_dimensions() -> None:
    grid = Grid(d=2, n_x=8, n_t=2, horizon=1.0)
    phi = ScalarField.nodes(grid, np.full(grid.node_shape(), 3.5))
    assert np.all(discrete_gradient(phi).values == 0.0)


def test_gradient_of_sine_is_consistent() -> None:
    grid = Grid(d=1, n_x=256, n_t=1, horizon=1.0)
    x = grid.coordinates()[0]
    phi = ScalarField.nodes(grid, np.stack([np.sin(2.0 * np.pi * x)] * 2))
    grad = discrete_gradient(phi).values[0, 0]
    # forward differences sit on the faces x + h/2
    exact = 2.0 * np.pi * np.cos(2.0 * np.pi * (x + 0.5 * grid.h_x))
    assert np.max(np.abs(grad - exact)) <= 10.0 * grid.h_x


@pytest.mark.parametrize("d", [1, 2])
def test_operators_commute_with_grid_translations(d: int) -> None:
    rng = np.random.default_rng(40 + d)
    grid = Grid(d=d, n_x=6, n_t=3, horizon=1.0)
    shifts = (2, 5)[:d]
    phi = rng.standard_normal(grid.node_shape())
    w = rng.standard_normal(grid.flux_shape())
    m = rng.uniform(0.5, 1.5, grid.cell_shape())
    m0 = rng.uniform(0.5, 1.5, grid.spatial_shape)

    def shift(values: np.ndarray) -> np.ndarray:
        first = values.ndim - d
        return np.roll(values, shifts, axis=tuple(range(first, values.ndim)))

    grad = discrete_gradient(ScalarField.nodes(grid, phi)).values
    shifted_grad = discrete_gradient(ScalarField.nodes(grid, shift(phi))).values
    np.testing.assert_allclose(shifted_grad, shift(grad), rtol=0.0, atol=1e-12)

    div = discrete_divergence(VectorField(grid=grid, values=w)).values
    shifted_div = discrete_divergence(VectorField(grid=grid, values=shift(w))).values
    np.testing.assert_allclose(shifted_div, shift(div), rtol=0.0, atol=1e-12)

    residual = continuity_residual_arrays(m, w, m0, grid)
    shifted = continuity_residual_arrays(shift(m), shift(w), shift(m0), grid)
    np.testing.assert_allclose(shifted.per_cell, residual.per_cell, rtol=1e-12, atol=1e-12)
    assert shifted.mass_drift == pytest.approx(residual.mass_drift, abs=1e-12)


def test_time_averaged_gradient_mixes_both_nodes() -> None:
    grid = Grid(d=1, n_x=4, n_t=1, horizon=1.0)
    x = np.arange(4) * grid.h_x
    phi = ScalarField.nodes(grid, np.stack([np.zeros(4), 2.0 * x]))
    earlier = discrete_gradient(phi)
    averaged = discrete_gradient(phi, t_averaging=True)
    assert np.all(earlier.values == 0.0)
    np.testing.assert_allclose(averaged.values[0, 0, :-1], 1.0)


def test_cell_field_is_rejected_by_gradient() -> None:
    grid = Grid(d=1, n_x=4, n_t=2, horizon=1.0)
    m = ScalarField.cells(grid, np.ones(grid.cell_shape()))
    with pytest.raises(FieldPlacementError):
        discrete_gradient(m)
    with pytest.raises(FieldPlacementError):
        time_derivative(m)


def test_shape_mismatch_is_rejected() -> None:
    grid = Grid(d=1, n_x=4, n_t=2, horizon=1.0)
    with pytest.raises(FieldShapeError):
        ScalarField.nodes(grid, np.zeros(grid.cell_shape()))
    with pytest.raises(FieldShapeError):
        VectorField(grid=grid, values=np.zeros(grid.cell_shape()))


def test_grid_rejects_bad_parameters() -> None:
    with pytest.raises(ValueError):
        Grid(d=3, n_x=4, n_t=2, horizon=1.0)
    with pytest.raises(ValueError):
        Grid(d=1, n_x=4, n_t=2, horizon=0.0)


def test_time_derivative_of_linear_profile() -> None:
    grid = Grid(d=1, n_x=4, n_t=4, horizon=2.0)
    times = grid.node_times()[:, None] * np.ones((1, 4))
    phi = ScalarField.nodes(grid, grid.horizon - times)
    np.testing.assert_allclose(time_derivative(phi).values, -1.0)


def test_continuity_residual_vanishes_for_static_density() -> None:
    grid = Grid(d=2, n_x=4, n_t=3, horizon=1.0)
    m = ScalarField.cells(grid, np.ones(grid.cell_shape()))
    w = VectorField(grid=grid, values=np.zeros(grid.flux_shape()))
    result = continuity_residual(m, w, np.ones(grid.spatial_shape))
    assert result.residual == 0.0
    assert result.mass_drift == pytest.approx(0.0, abs=1e-14)


def test_continuity_residual_detects_corrupted_cell() -> None:
    grid = Grid(d=1, n_x=8, n_t=4, horizon=1.0)
    values = np.ones(grid.cell_shape())
    values[1, 3] += 0.1
    m = ScalarField.cells(grid, values)
    w = VectorField(grid=grid, values=np.zeros(grid.flux_shape()))
    result = continuity_residual(m, w, np.ones(grid.spatial_shape))

    pointwise_jump = 0.1 / grid.h_t
    assert result.per_cell[0] == 0.0
    assert result.per_cell[1] == pytest.approx(pointwise_jump * grid.cell_volume)
    assert result.per_cell[2] == pytest.approx(pointwise_jump * grid.cell_volume)
    assert result.residual == pytest.approx(pointwise_jump * grid.cell_volume)
    assert result.mass_drift == pytest.approx(0.1 * grid.cell_volume)
