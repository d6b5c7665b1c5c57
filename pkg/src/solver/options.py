from __future__ import annotations

from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from .exceptions import StepSizeError

DEFAULT_STEP_FACTOR = 0.9


class SolverOptions(BaseModel):
    """Tuning knobs of the primal-dual iteration and its stopping rule."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    max_iters: int = Field(default=20000, gt=0, description="Iteration cap")
    tol_gap: float = Field(
        default=1e-5, gt=0.0, description="Relative duality-gap tolerance |A+B|/(1+|A|+|B|)"
    )
    tol_feas: float = Field(
        default=1e-6, gt=0.0, description="Tolerance on the continuity (or divergence) residual"
    )
    step_primal: Optional[float] = Field(
        default=None, gt=0.0, description="Primal step sigma; defaults to 0.9/||K||"
    )
    step_dual: Optional[float] = Field(
        default=None, gt=0.0, description="Dual step tau; defaults to 0.9/||K||"
    )
    theta: float = Field(default=1.0, ge=0.0, le=1.0, description="Over-relaxation parameter")
    prox_inner_tol: float = Field(default=1e-10, gt=0.0, description="Cell-wise prox root-find tolerance")
    prox_inner_max_iters: int = Field(default=60, gt=0, description="Cell-wise prox iteration cap")
    rng_seed: int = Field(default=0, ge=0, description="Seed of the initial perturbation")
    init_noise: float = Field(default=1e-3, ge=0.0, description="Amplitude of the seeded initial perturbation of phi")
    check_every: int = Field(default=10, gt=0, description="Iterations between certificate evaluations")
    log_every: int = Field(default=100, gt=0, description="Certificate evaluations between progress log lines")
    power_iters: int = Field(default=50, gt=0, description="Power-method iterations for ||K||")

    def steps(self, operator_norm: float) -> Tuple[float, float]:
        """(sigma, tau) checked against sigma * tau * ||K||^2 <= 1."""
        default = DEFAULT_STEP_FACTOR / operator_norm
        sigma = self.step_primal if self.step_primal is not None else default
        tau = self.step_dual if self.step_dual is not None else default
        if sigma * tau * operator_norm**2 > 1.0 + 1e-12:
            raise StepSizeError(
                f"sigma * tau * ||K||^2 = {sigma * tau * operator_norm**2:.4f} exceeds 1"
            )
        return sigma, tau
