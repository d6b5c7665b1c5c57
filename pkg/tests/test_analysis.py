from __future__ import annotations

import numpy as np
import pytest

from src.analysis import (
    GridMismatch,
    WrongFamily,
    energy_inequality_check,
    explicit_ergodic_oracle,
    long_time_experiment,
    normalised_density,
    rescale_to_unit_time,
    stationary_bundle,
    weak_solution_residuals,
)
from src.analysis.energy import _node_density
from src.functionals import ErgodicState
from src.grid import Grid, ScalarField, VectorField
from src.model import CouplingFamily
from src.solver import SolutionBundle, SolverOptions, solve_time_dependent

FAST = SolverOptions(max_iters=20000, tol_gap=1e-6, tol_feas=1e-6)


def _uniform_state(grid: Grid, lam: float = 1.0) -> ErgodicState:
    return ErgodicState(
        lam=lam,
        phi=np.zeros(grid.spatial_shape),
        m=np.ones(grid.spatial_shape),
        w=np.zeros((grid.d, *grid.spatial_shape)),
    )


def _with_density(bundle: SolutionBundle, m: np.ndarray) -> SolutionBundle:
    grid = bundle.grid
    return SolutionBundle(
        grid=grid,
        phi=bundle.phi,
        alpha=bundle.alpha,
        m=ScalarField.cells(grid, m),
        w=VectorField(grid=grid, values=bundle.w.values),
    )


def test_exact_stationary_solution_has_no_residuals(reference_model, small_grid) -> None:
    bundle = stationary_bundle(_uniform_state(small_grid), reference_model, small_grid)
    expected = (small_grid.horizon - small_grid.node_times())[:, None]
    np.testing.assert_allclose(bundle.phi.values, np.broadcast_to(expected, small_grid.node_shape()))

    report = weak_solution_residuals(bundle, reference_model, small_grid)
    assert report.hj_violation_support <= 1e-10
    assert report.hj_violation_global <= 1e-10
    assert report.identity_gap <= 1e-10
    assert report.continuity_residual <= 1e-10
    assert report.terminal_violation <= 1e-10
    assert report.fenchel_young_gap <= 1e-10


def test_exact_stationary_solution_in_two_dimensions(model_factory) -> None:
    grid = Grid(d=2, n_x=4, n_t=3, horizon=2.0)
    model = model_factory(grid)
    report = weak_solution_residuals(stationary_bundle(_uniform_state(grid), model, grid), model, grid)
    assert report.worst() <= 1e-10


def test_corrupted_density_raises_continuity_residual(reference_model, small_grid) -> None:
    bundle = stationary_bundle(_uniform_state(small_grid), reference_model, small_grid)
    m = bundle.m.values.copy()
    m[3, 2] += 0.1
    report = weak_solution_residuals(_with_density(bundle, m), reference_model, small_grid)
    assert report.continuity_residual == pytest.approx(0.1 / small_grid.h_t * small_grid.cell_volume)


def test_solver_output_satisfies_weak_solution_identities(reference_model, small_grid) -> None:
    bundle = solve_time_dependent(reference_model, small_grid, FAST)
    report = weak_solution_residuals(bundle, reference_model, small_grid)
    assert report.identity_gap <= 1e-3 * small_grid.horizon
    assert report.hj_violation_support <= 1e-3


def test_residuals_reject_foreign_grid(reference_model, small_grid) -> None:
    bundle = stationary_bundle(_uniform_state(small_grid), reference_model, small_grid)
    with pytest.raises(GridMismatch):
        weak_solution_residuals(bundle, reference_model, small_grid.with_time(4, 1.0))


def test_energy_inequality_of_identical_solutions(reference_model, small_grid) -> None:
    bundle = stationary_bundle(_uniform_state(small_grid), reference_model, small_grid)
    report = energy_inequality_check(bundle, bundle, reference_model, small_grid)
    assert report.lhs == 0.0
    assert report.rhs == 0.0
    assert report.passed
    assert (report.t1, report.t2) == (1, small_grid.n_t - 1)


def test_energy_coupling_term_on_one_cell(reference_model, small_grid) -> None:
    first = stationary_bundle(_uniform_state(small_grid), reference_model, small_grid)
    m = first.m.values.copy()
    m[2, 5] = 2.0
    second = _with_density(first, m)
    report = energy_inequality_check(first, second, reference_model, small_grid)
    assert report.first_bregman == 0.0
    assert report.second_bregman == 0.0
    assert report.coupling_term == pytest.approx(small_grid.h_t * small_grid.cell_volume)


def test_energy_inequality_between_two_solves(model_factory, small_grid) -> None:
    x = small_grid.coordinates()[0]
    reference = model_factory(small_grid)
    perturbed = model_factory(small_grid, m0=1.0 + 0.5 * np.cos(2.0 * np.pi * x))
    first = solve_time_dependent(reference, small_grid, FAST)
    second = solve_time_dependent(perturbed, small_grid, FAST)
    report = energy_inequality_check(first, second, reference, small_grid)
    assert min(report.terms()) >= -1e-10
    assert report.lhs <= report.rhs + 1e-3
    assert report.passed


def test_energy_window_is_validated(reference_model, small_grid) -> None:
    bundle = stationary_bundle(_uniform_state(small_grid), reference_model, small_grid)
    with pytest.raises(ValueError):
        energy_inequality_check(bundle, bundle, reference_model, small_grid, t1=4, t2=4)
    with pytest.raises(ValueError, match="t1"):
        energy_inequality_check(bundle, bundle, reference_model, small_grid, t1=0, t2=4)


def test_node_density_is_the_cell_ending_at_the_node(reference_model, small_grid) -> None:
    bundle = stationary_bundle(_uniform_state(small_grid), reference_model, small_grid)
    m = bundle.m.values.copy()
    m[2] = 3.0
    changed = _with_density(bundle, m)
    np.testing.assert_array_equal(_node_density(changed, 3), m[2])
    with pytest.raises(ValueError, match="node 0"):
        _node_density(changed, 0)


def test_oracle_flat_potential(model_factory, small_grid) -> None:
    lam, m = explicit_ergodic_oracle(model_factory(small_grid), small_grid)
    assert lam == pytest.approx(1.0, abs=1e-10)
    np.testing.assert_allclose(m, 1.0, atol=1e-10)


def test_oracle_cosine_potential(model_factory) -> None:
    grid = Grid(d=1, n_x=64, n_t=1, horizon=1.0)
    x = grid.coordinates()[0]
    lam, m = explicit_ergodic_oracle(model_factory(grid, potential=np.cos(2.0 * np.pi * x)), grid)
    assert lam == pytest.approx(1.0, abs=1e-10)
    np.testing.assert_allclose(m, 1.0 - np.cos(2.0 * np.pi * x), atol=1e-10)


def test_oracle_double_cosine_potential(model_factory) -> None:
    grid = Grid(d=1, n_x=64, n_t=1, horizon=1.0)
    x = grid.coordinates()[0]
    model = model_factory(grid, potential=2.0 * np.cos(2.0 * np.pi * x))
    lam, m = explicit_ergodic_oracle(model, grid)
    assert 0.0 < lam < 1.0
    assert np.sum(m) * grid.cell_volume == pytest.approx(1.0, abs=1e-9)
    levels = np.linspace(-2.0, 4.0, 50)
    masses = [np.sum(normalised_density(model, level)) for level in levels]
    assert np.all(np.diff(masses) >= 0.0)


def test_oracle_rejects_other_families(model_factory, small_grid) -> None:
    with pytest.raises(WrongFamily):
        explicit_ergodic_oracle(model_factory(small_grid, r=3.0), small_grid)
    with pytest.raises(WrongFamily):
        explicit_ergodic_oracle(model_factory(small_grid, family=CouplingFamily.LOG), small_grid)
    with pytest.raises(WrongFamily):
        explicit_ergodic_oracle(
            model_factory(small_grid, hamiltonian_weight=np.full(small_grid.spatial_shape, 2.0)),
            small_grid,
        )


def test_rescale_with_unit_horizon_is_identity(small_grid, rng) -> None:
    field = ScalarField.nodes(small_grid, rng.standard_normal(small_grid.node_shape()))
    rescaled = rescale_to_unit_time(field, 1.0)
    np.testing.assert_array_equal(rescaled.values, field.values)
    assert rescaled.grid.horizon == 1.0


def test_rescaled_value_function_is_linear_in_s() -> None:
    grid = Grid(d=1, n_x=4, n_t=20, horizon=5.0)
    remaining = (grid.horizon - grid.node_times())[:, None] * np.ones((1, 4))
    psi = rescale_to_unit_time(ScalarField.nodes(grid, remaining), grid.horizon)
    s = psi.grid.node_times()[:, None]
    np.testing.assert_allclose(psi.values / grid.horizon, np.broadcast_to(1.0 - s, psi.values.shape), atol=1e-12)


def test_interpolated_rescale_preserves_constants_and_mass() -> None:
    grid = Grid(d=1, n_x=4, n_t=6, horizon=3.0)
    rng = np.random.default_rng(5)
    profiles = rng.uniform(0.5, 1.5, (grid.n_t, 4))
    profiles /= np.sum(profiles, axis=1, keepdims=True) * grid.cell_volume
    density = rescale_to_unit_time(ScalarField.cells(grid, profiles), grid.horizon, n_t=10)
    mass = np.sum(density.values, axis=1) * grid.cell_volume
    np.testing.assert_allclose(mass, 1.0, atol=1e-12)

    constant = rescale_to_unit_time(ScalarField.nodes(grid, np.full(grid.node_shape(), 2.5)), grid.horizon, n_t=9)
    np.testing.assert_allclose(constant.values, 2.5)


def test_long_time_experiment_on_stationary_data(reference_model) -> None:
    template = Grid(d=1, n_x=8, n_t=8, horizon=1.0)
    report = long_time_experiment(reference_model, template, [1.0, 2.0], FAST)
    assert report.horizons == [1.0, 2.0]
    assert report.n_t == [8, 16]
    assert report.lambda_bar == pytest.approx(1.0)
    assert all(report.converged)
    assert max(report.mu_errors) <= 1e-2
    assert max(report.psi_errors) <= 1e-2
    assert report.psi_sign == 1


def test_long_time_experiment_rejects_unsorted_horizons(reference_model, small_grid) -> None:
    with pytest.raises(ValueError):
        long_time_experiment(reference_model, small_grid, [2.0, 1.0])


@pytest.mark.slow
def test_long_time_average_with_cosine_potential(model_factory) -> None:
    template = Grid(d=1, n_x=64, n_t=64, horizon=1.0)
    x = template.coordinates()[0]
    model = model_factory(template, potential=np.cos(2.0 * np.pi * x))
    report = long_time_experiment(model, template, [2.0, 5.0, 10.0, 20.0], SolverOptions())
    assert all(b < a for a, b in zip(report.mu_errors, report.mu_errors[1:]))
    assert report.psi_errors[-1] <= 0.05
    assert report.mu_slope is not None and report.mu_slope < 0.0
