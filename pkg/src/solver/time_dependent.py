from __future__ import annotations

from typing import List, Optional, Tuple

import numpy as np

from src.functionals import eval_dual_B_arrays, hj_operator_arrays
from src.grid import Grid, ScalarField, VectorField, continuity_residual_arrays
from src.logger import get_solver_logger
from src.model import AssumptionReport, ModelSpec, check_assumptions
from src.model.spec import MASS_TOLERANCE

from .exceptions import InfeasibleInput, NonConvergence
from .models import GapRecord, SolutionBundle
from .operators import adjoint_space_time, apply_space_time, estimate_operator_norm
from .options import SolverOptions
from .prox import moreau_dual_point

SUPPORT_THRESHOLD = 1e-10


def validate_inputs(model: ModelSpec, grid: Grid) -> None:
    """Shape agreement between model and grid, and unit mass of m0."""
    if model.d != grid.d or model.m0.shape != grid.spatial_shape:
        raise InfeasibleInput(
            f"model data of shape {model.m0.shape} do not fit a grid with spatial shape {grid.spatial_shape}"
        )
    mass = float(np.sum(model.m0)) * grid.cell_volume
    if abs(mass - 1.0) > MASS_TOLERANCE:
        raise InfeasibleInput(f"initial density must have unit mass, got {mass:.12g}")


def complementarity(alpha: np.ndarray, m: np.ndarray, model: ModelSpec, grid: Grid) -> float:
    """Integral of |alpha - f(x, m)| over the cells where m carries mass."""
    support = m > SUPPORT_THRESHOLD * max(float(np.max(m)), 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        mismatch = np.abs(alpha - model.f(np.where(support, m, 1.0)))
    return float(np.sum(np.where(support, mismatch, 0.0))) * grid.h_t * grid.cell_volume


class TimeDependentSolver:
    """Primal-dual (Chambolle-Pock) iteration for the time-dependent saddle problem.

    The primal variable is phi on the time nodes (terminal node pinned to
    phi_T); the dual variable is -(m, w) on the time cells. Each step applies
    the cell-wise prox through the Moreau identity, so m = dF*(alpha) >= 0 and
    w = -m DpH(D phi) hold at every iterate. Certificates and the returned
    bundle use (m, w) rescaled to unit mass per time cell.
    """

    def __init__(self, model: ModelSpec, grid: Grid, options: Optional[SolverOptions] = None) -> None:
        self._model = model
        self._grid = grid
        self._options = options or SolverOptions()
        self._logger = get_solver_logger("solver.time_dependent")

    def _initial_phi(self) -> np.ndarray:
        grid = self._grid
        opts = self._options
        rng = np.random.default_rng(opts.rng_seed)
        phi = np.zeros(grid.node_shape())
        phi[:-1] = np.broadcast_to(self._model.phi_T, phi[:-1].shape)
        phi[:-1] += opts.init_noise * rng.standard_normal(phi[:-1].shape)
        phi[-1] = self._model.phi_T
        return phi

    def certificate(self, iteration: int, phi: np.ndarray, m: np.ndarray, w: np.ndarray) -> GapRecord:
        model, grid = self._model, self._grid
        alpha = hj_operator_arrays(phi, model, grid)
        primal = float(np.sum(model.F_star(alpha))) * grid.h_t * grid.cell_volume
        primal -= float(np.sum(phi[0] * model.m0)) * grid.cell_volume
        dual = eval_dual_B_arrays(m, w, model, grid)
        continuity = continuity_residual_arrays(m, w, model.m0, grid)
        gap = primal + dual
        return GapRecord(
            iteration=iteration,
            primal=primal,
            dual=dual,
            gap=gap,
            relative_gap=abs(gap) / (1.0 + abs(primal) + abs(dual)),
            feasibility=continuity.residual,
            mass_drift=continuity.mass_drift,
        )

    def _converged(self, record: GapRecord) -> bool:
        opts = self._options
        return (
            record.relative_gap <= opts.tol_gap
            and record.feasibility <= opts.tol_feas
            and record.mass_drift <= MASS_TOLERANCE
        )

    def _unit_mass(self, m: np.ndarray, w: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Rescale each time cell of (m, w) to unit mass; w = -m DpH is linear in m."""
        grid = self._grid
        mass = np.sum(m.reshape(grid.n_t, -1), axis=1) * grid.cell_volume
        scale = np.where(mass > 0.0, 1.0 / np.where(mass > 0.0, mass, 1.0), 1.0)
        m_scale = scale.reshape((grid.n_t,) + (1,) * grid.d)
        w_scale = scale.reshape((grid.n_t,) + (1,) * (grid.d + 1))
        return m * m_scale, w * w_scale

    def _bundle(
        self,
        phi: np.ndarray,
        y: Tuple[np.ndarray, np.ndarray],
        history: List[GapRecord],
        iterations: int,
        converged: bool,
        report: AssumptionReport,
    ) -> SolutionBundle:
        grid, model = self._grid, self._model
        m, w = self._unit_mass(-y[0], -y[1])
        alpha = hj_operator_arrays(phi, model, grid)
        return SolutionBundle(
            grid=grid,
            phi=ScalarField.nodes(grid, phi),
            alpha=ScalarField.cells(grid, alpha),
            m=ScalarField.cells(grid, m),
            w=VectorField(grid=grid, values=w),
            gap_history=history,
            iterations=iterations,
            converged=converged,
            complementarity=complementarity(alpha, m, model, grid),
            assumption_report=report,
        )

    def solve(self) -> SolutionBundle:
        model, grid, opts = self._model, self._grid, self._options
        report = check_assumptions(model, grid.d)
        validate_inputs(model, grid)

        norm = estimate_operator_norm(grid, max_iters=opts.power_iters, seed=opts.rng_seed)
        sigma, tau = opts.steps(norm)
        self._logger.info(
            f"Time-dependent solve on d={grid.d} n_x={grid.n_x} n_t={grid.n_t} T={grid.horizon:g} "
            f"(||K|| ~ {norm:.4g}, sigma={sigma:.3g}, tau={tau:.3g})"
        )

        phi = self._initial_phi()
        phi_bar = phi.copy()
        y_a = -np.broadcast_to(model.m0, grid.cell_shape()).copy()
        y_b = np.zeros(grid.flux_shape())
        initial_push = model.m0 / grid.h_t

        history: List[GapRecord] = []
        best: Optional[Tuple[GapRecord, np.ndarray, np.ndarray, np.ndarray]] = None
        converged = False
        iteration = 0
        for iteration in range(1, opts.max_iters + 1):
            k_a, k_b = apply_space_time(phi_bar, grid)
            v_a = y_a + tau * k_a
            v_b = y_b + tau * k_b
            y_a, y_b = moreau_dual_point(
                v_a, v_b, tau, model, tol=opts.prox_inner_tol, max_iters=opts.prox_inner_max_iters
            )

            descent = adjoint_space_time(y_a, y_b, grid)
            descent[0] -= initial_push
            phi_old = phi
            phi = phi - sigma * descent
            phi[-1] = model.phi_T
            phi_bar = phi + opts.theta * (phi - phi_old)

            if iteration % opts.check_every and iteration != opts.max_iters:
                continue
            record = self.certificate(iteration, phi, *self._unit_mass(-y_a, -y_b))
            history.append(record)
            if best is None or record.merit() < best[0].merit():
                best = (record, phi.copy(), y_a.copy(), y_b.copy())
            if len(history) % opts.log_every == 0:
                self._logger.info(
                    f"iter {iteration}: gap={record.gap:.3e} rel={record.relative_gap:.3e} "
                    f"continuity={record.feasibility:.3e}"
                )
            if self._converged(record):
                converged = True
                break

        if converged:
            self._logger.info(f"Converged after {iteration} iterations (gap {history[-1].gap:.3e})")
            return self._bundle(phi, (y_a, y_b), history, iteration, True, report)

        assert best is not None
        record, phi_best, y_a_best, y_b_best = best
        bundle = self._bundle(phi_best, (y_a_best, y_b_best), history, iteration, False, report)
        message = (
            f"no convergence in {opts.max_iters} iterations "
            f"(best relative gap {record.relative_gap:.3e}, continuity {record.feasibility:.3e})"
        )
        self._logger.warning(message)
        raise NonConvergence(message, bundle=bundle)


def solve_time_dependent(
    model: ModelSpec, grid: Grid, opts: Optional[SolverOptions] = None
) -> SolutionBundle:
    """Solve the time-dependent dual pair; raises NonConvergence carrying the best iterate."""
    return TimeDependentSolver(model, grid, opts).solve()
