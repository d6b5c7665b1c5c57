"""Discrete objectives of the two dual problem pairs.

All integrals are midpoint sums: h_t h_x^d over time cells and h_x^d over
spatial points. The HJ operator on cell k is
-(phi_{k+1} - phi_k) / h_t + H(x, D phi_k), with D the forward spatial
difference at the earlier node, which makes the pairing with (m, w) the
exact transpose of the discrete continuity equation.
"""

from __future__ import annotations

import numpy as np

from src.grid import FieldShapeError, Grid, ScalarField, spatial_gradient
from src.logger import get_solver_logger
from src.model import ModelSpec
from src.model.hamiltonian import Index, at

from .exceptions import ConstraintViolation, TerminalConditionError
from .states import DualState, ErgodicState, PrimalState

_logger = get_solver_logger("functionals")

RELAXED_TOLERANCE = 1e-8


def _extended_sum(values: np.ndarray, label: str) -> float:
    """Sum that short-circuits to +inf, logging how many cells are infinite."""
    infinite = np.isposinf(values)
    count = int(np.count_nonzero(infinite))
    if count:
        _logger.warning(f"{label}: {count} cell(s) evaluate to +inf")
        return float("inf")
    return float(np.sum(values))


def hj_operator_arrays(phi: np.ndarray, model: ModelSpec, grid: Grid) -> np.ndarray:
    """-d_t phi + H(x, D phi) on every time cell, from raw node values."""
    d_t = np.diff(phi, axis=0) / grid.h_t
    grad = spatial_gradient(phi[:-1], grid.d, grid.h_x)
    return -d_t + model.H(grad)


def hj_operator(phi: ScalarField, model: ModelSpec) -> ScalarField:
    grid = phi.grid
    return ScalarField.cells(grid, hj_operator_arrays(phi.values, model, grid))


def perspective_kinetic(model: ModelSpec, m: np.ndarray, w: np.ndarray, x: Index = None) -> np.ndarray:
    """m L(x, w / m), with 0 at (0, 0) and +inf at (0, w != 0) or m < 0."""
    m = np.asarray(m, dtype=float)
    w = np.asarray(w, dtype=float)
    hamiltonian = model.hamiltonian
    rc = hamiltonian.conjugate_exponent
    c = at(hamiltonian.weight, x)
    norm = np.linalg.norm(w, axis=model.component_axis(x))
    positive = m > 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        kinetic = c ** (1.0 - rc) * norm**rc / (rc * np.where(positive, m, 1.0) ** (rc - 1.0))
    value = np.where(positive, kinetic + m * at(hamiltonian.potential, x), 0.0)
    blocked = (m < 0.0) | (~positive & (norm > 0.0))
    return np.where(blocked, np.inf, value)


def _check_terminal(phi: ScalarField, model: ModelSpec, strict: bool) -> None:
    last = phi.values[-1]
    scale = 1e-12 * (1.0 + float(np.max(np.abs(model.phi_T))))
    if strict:
        if not np.allclose(last, model.phi_T, rtol=0.0, atol=scale):
            raise TerminalConditionError("phi on the last node must equal phi_T")
    elif np.any(last > model.phi_T + scale):
        raise TerminalConditionError("phi on the last node must not exceed phi_T")


def _initial_pairing(phi0: np.ndarray, model: ModelSpec, grid: Grid) -> float:
    return float(np.sum(phi0 * model.m0)) * grid.cell_volume


def eval_primal_A(phi: ScalarField, model: ModelSpec, grid: Grid) -> float:
    """Strict primal objective: integral of F*(x, -d_t phi + H(x, D phi)) minus <phi(0), m0>.

    D phi on a time cell is the spatial gradient at the cell's earlier node,
    not the mean of the two bounding nodes, so that the transpose of the
    space-time operator is the continuity residual used by the solver.
    """
    if phi.values.shape != grid.node_shape():
        raise FieldShapeError(f"phi expects shape {grid.node_shape()}, got {phi.values.shape}")
    _check_terminal(phi, model, strict=True)
    alpha = hj_operator_arrays(phi.values, model, grid)
    running = _extended_sum(model.F_star(alpha), "primal A") * grid.h_t * grid.cell_volume
    return running - _initial_pairing(phi.values[0], model, grid)


def eval_relaxed_A(state: PrimalState, model: ModelSpec, grid: Grid, tol: float = RELAXED_TOLERANCE) -> float:
    """Relaxed objective with alpha in place of the HJ operator.

    Requires -d_t phi + H(x, D phi) <= alpha on every cell (up to ``tol``)
    and phi(T) <= phi_T.
    """
    phi = state.phi
    alpha = state.alpha.values
    if alpha.shape != grid.cell_shape() or phi.values.shape != grid.node_shape():
        raise FieldShapeError("primal state does not match the grid")
    _check_terminal(phi, model, strict=False)
    excess = hj_operator_arrays(phi.values, model, grid) - alpha
    worst = float(np.max(excess))
    if worst > tol * (1.0 + float(np.max(np.abs(alpha)))):
        raise ConstraintViolation(
            f"-d_t phi + H(x, D phi) exceeds alpha by {worst:.3e} on some cell"
        )
    running = _extended_sum(model.F_star(alpha), "relaxed A") * grid.h_t * grid.cell_volume
    return running - _initial_pairing(phi.values[0], model, grid)


def dual_integrand(model: ModelSpec, m: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Cell-wise m L(x, w/m) + F(x, m)."""
    return perspective_kinetic(model, m, w) + model.F(m)


def eval_dual_B_arrays(m: np.ndarray, w: np.ndarray, model: ModelSpec, grid: Grid) -> float:
    terminal = float(np.sum(model.phi_T * m[-1])) * grid.cell_volume
    running = _extended_sum(dual_integrand(model, m, w), "dual B")
    return terminal + running * grid.h_t * grid.cell_volume


def eval_dual_B(state: DualState, model: ModelSpec, grid: Grid) -> float:
    """<phi_T, m(T)> plus the integral of the kinetic perspective and F(x, m)."""
    m = state.m.values
    w = state.w.values
    if m.shape != grid.cell_shape() or w.shape != grid.flux_shape():
        raise FieldShapeError("dual state does not match the grid")
    return eval_dual_B_arrays(m, w, model, grid)


def eval_ergodic_A(lam: float, phi: np.ndarray, model: ModelSpec, grid: Grid) -> float:
    """Integral of F*(x, lam + H(x, D phi)) minus lam."""
    phi = np.asarray(phi, dtype=float)
    if phi.shape != grid.spatial_shape:
        raise FieldShapeError(f"phi expects shape {grid.spatial_shape}, got {phi.shape}")
    grad = spatial_gradient(phi, grid.d, grid.h_x)
    alpha = lam + model.H(grad)
    return _extended_sum(model.F_star(alpha), "ergodic A") * grid.cell_volume - lam


def eval_ergodic_B(m: np.ndarray, w: np.ndarray, model: ModelSpec, grid: Grid) -> float:
    """Integral of m H*(x, -w/m) + F(x, m) over the torus."""
    m = np.asarray(m, dtype=float)
    w = np.asarray(w, dtype=float)
    if m.shape != grid.spatial_shape or w.shape != (grid.d, *grid.spatial_shape):
        raise FieldShapeError("ergodic density/flux do not match the grid")
    return _extended_sum(dual_integrand(model, m, w), "ergodic B") * grid.cell_volume


def duality_gap(primal: PrimalState, dual: DualState, model: ModelSpec, grid: Grid) -> float:
    """A(phi, alpha) + B(m, w); nonnegative for feasible pairs, zero at a saddle point."""
    return eval_relaxed_A(primal, model, grid) + eval_dual_B(dual, model, grid)


def ergodic_duality_gap(state: ErgodicState, model: ModelSpec, grid: Grid) -> float:
    return eval_ergodic_A(state.lam, state.phi, model, grid) + eval_ergodic_B(state.m, state.w, model, grid)
