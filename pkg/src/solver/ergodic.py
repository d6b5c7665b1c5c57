from __future__ import annotations

from typing import List, Optional, Tuple

import numpy as np

from src.functionals import eval_ergodic_A, eval_ergodic_B
from src.grid import Grid, spatial_divergence
from src.logger import get_solver_logger
from src.model import ModelSpec, check_assumptions

from .exceptions import InfeasibleInput, NonConvergence
from .models import ErgodicSolution, GapRecord
from .operators import apply_ergodic, estimate_operator_norm, lambda_scale
from .options import SolverOptions
from .prox import moreau_dual_point


class ErgodicSolver:
    """Primal-dual iteration for the stationary problem on the torus.

    Primal unknowns are the ergodic constant and phi; the dual unknown is
    (m, -w). The constant enters through a channel scaled by
    ``lambda_scale(grid)`` so that it moves at the pace of the spatial part.
    """

    def __init__(self, model: ModelSpec, grid: Grid, options: Optional[SolverOptions] = None) -> None:
        self._model = model
        self._grid = grid
        self._options = options or SolverOptions()
        self._logger = get_solver_logger("solver.ergodic")

    def initial_constant(self) -> float:
        """Constant matching the uniform density with flat phi: mean of f(x, 1) + V(x)."""
        model = self._model
        uniform = np.ones(self._grid.spatial_shape)
        return float(np.mean(model.f(uniform) + model.hamiltonian.potential))

    def certificate(self, iteration: int, lam: float, phi: np.ndarray, m: np.ndarray, w: np.ndarray) -> GapRecord:
        model, grid = self._model, self._grid
        primal = eval_ergodic_A(lam, phi, model, grid)
        dual = eval_ergodic_B(m, w, model, grid)
        gap = primal + dual
        divergence = float(np.sum(np.abs(spatial_divergence(w, grid.d, grid.h_x)))) * grid.cell_volume
        return GapRecord(
            iteration=iteration,
            primal=primal,
            dual=dual,
            gap=gap,
            relative_gap=abs(gap) / (1.0 + abs(primal) + abs(dual)),
            feasibility=divergence,
            mass_drift=abs(float(np.sum(m)) * grid.cell_volume - 1.0),
        )

    def _converged(self, record: GapRecord) -> bool:
        opts = self._options
        return (
            record.relative_gap <= opts.tol_gap
            and record.feasibility <= opts.tol_feas
            and record.mass_drift <= opts.tol_feas
        )

    def solve(self) -> ErgodicSolution:
        model, grid, opts = self._model, self._grid, self._options
        if model.d != grid.d or model.m0.shape != grid.spatial_shape:
            raise InfeasibleInput(
                f"model data of shape {model.m0.shape} do not fit a grid with spatial shape {grid.spatial_shape}"
            )
        report = check_assumptions(model, grid.d)

        kappa = lambda_scale(grid)
        norm = estimate_operator_norm(grid, ergodic=True, max_iters=opts.power_iters, seed=opts.rng_seed)
        sigma, tau = opts.steps(norm)
        self._logger.info(
            f"Ergodic solve on d={grid.d} n_x={grid.n_x} (||K|| ~ {norm:.4g}, sigma={sigma:.3g}, tau={tau:.3g})"
        )

        rng = np.random.default_rng(opts.rng_seed)
        lam_scaled = self.initial_constant() / kappa
        phi = opts.init_noise * rng.standard_normal(grid.spatial_shape)
        lam_bar, phi_bar = lam_scaled, phi.copy()
        y_a = np.ones(grid.spatial_shape)
        y_b = np.zeros((grid.d, *grid.spatial_shape))

        history: List[GapRecord] = []
        best: Optional[Tuple[GapRecord, float, np.ndarray, np.ndarray, np.ndarray]] = None
        converged = False
        iteration = 0
        for iteration in range(1, opts.max_iters + 1):
            k_a, k_b = apply_ergodic(lam_bar, phi_bar, grid, kappa)
            v_a = y_a + tau * k_a
            v_b = y_b + tau * k_b
            # g(a, b) = F*(a + H(b)) is the time-dependent g composed with a -> -a.
            neg_m, y_b = moreau_dual_point(
                -v_a, v_b, tau, model, tol=opts.prox_inner_tol, max_iters=opts.prox_inner_max_iters
            )
            y_a = -neg_m

            m, w = y_a, -y_b
            mass = float(np.sum(m)) * grid.cell_volume
            lam_old, phi_old = lam_scaled, phi
            lam_scaled = lam_scaled - sigma * kappa * (mass - 1.0)
            phi = phi - sigma * spatial_divergence(w, grid.d, grid.h_x)
            lam_bar = lam_scaled + opts.theta * (lam_scaled - lam_old)
            phi_bar = phi + opts.theta * (phi - phi_old)

            if iteration % opts.check_every and iteration != opts.max_iters:
                continue
            record = self.certificate(iteration, kappa * lam_scaled, phi, m, w)
            history.append(record)
            if best is None or record.merit() < best[0].merit():
                best = (record, kappa * lam_scaled, phi.copy(), m.copy(), w.copy())
            if len(history) % opts.log_every == 0:
                self._logger.info(
                    f"iter {iteration}: lambda={kappa * lam_scaled:.6f} rel={record.relative_gap:.3e} "
                    f"div={record.feasibility:.3e} mass={record.mass_drift:.3e}"
                )
            if self._converged(record):
                converged = True
                break

        assert best is not None
        if converged:
            lam, phi_out, m_out, w_out = kappa * lam_scaled, phi, m, w
        else:
            _, lam, phi_out, m_out, w_out = best
        solution = ErgodicSolution(
            grid=grid,
            lam=lam,
            phi=phi_out - float(np.mean(phi_out)),
            m=m_out,
            w=w_out,
            gap_history=history,
            iterations=iteration,
            converged=converged,
            assumption_report=report,
        )
        if converged:
            self._logger.info(f"Converged after {iteration} iterations, lambda = {lam:.8f}")
            return solution
        message = (
            f"ergodic iteration did not converge in {opts.max_iters} iterations "
            f"(best relative gap {best[0].relative_gap:.3e})"
        )
        self._logger.warning(message)
        raise NonConvergence(message, solution=solution)


def solve_ergodic(model: ModelSpec, grid: Grid, opts: Optional[SolverOptions] = None) -> ErgodicSolution:
    """Solve the stationary dual pair; the returned phi has zero mean."""
    return ErgodicSolver(model, grid, opts).solve()
