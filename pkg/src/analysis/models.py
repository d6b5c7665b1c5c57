from __future__ import annotations

from typing import List, Optional

from pydantic import BaseModel, Field, model_validator


class ResidualReport(BaseModel):
    """How far a (phi, m, w) triple is from a weak solution; every entry is nonnegative."""

    hj_violation_support: float = Field(
        ge=0.0, description="max (-d_t phi + H(x, D phi) - f(x, m))_+ over cells with m > eps_m"
    )
    hj_violation_global: float = Field(
        ge=0.0, description="Same positive part taken over every cell"
    )
    identity_gap: float = Field(
        ge=0.0, description="Error in the integral identity pairing the HJ and continuity equations"
    )
    continuity_residual: float = Field(ge=0.0, description="Worst-cell L1 continuity residual")
    mass_drift: float = Field(ge=0.0, description="Largest deviation of the per-cell mass from 1")
    terminal_violation: float = Field(ge=0.0, description="max (phi(T, .) - phi_T)_+")
    fenchel_young_gap: float = Field(
        ge=0.0, description="Integral of F*(x, alpha) + F(x, m) - alpha m"
    )
    support_threshold: float = Field(ge=0.0, description="eps_m used to define the support of m")

    def worst(self) -> float:
        return max(
            self.hj_violation_support,
            self.identity_gap,
            self.continuity_residual,
            self.terminal_violation,
        )


class EnergyReport(BaseModel):
    """Both sides of the energy inequality between two solutions on [t1, t2]."""

    lhs: float
    rhs: float
    passed: bool
    first_bregman: float = Field(description="Integral of m2 times the Bregman divergence of H at D phi2")
    second_bregman: float = Field(description="Integral of m1 times the Bregman divergence of H at D phi1")
    coupling_term: float = Field(description="Integral of (f(m2) - f(m1))(m2 - m1)")
    t1: int = Field(ge=0, description="First time node")
    t2: int = Field(ge=1, description="Last time node")

    def terms(self) -> List[float]:
        return [self.first_bregman, self.second_bregman, self.coupling_term]


class LongTimeReport(BaseModel):
    """Distance of rescaled time-dependent solutions to the ergodic limit, per horizon."""

    horizons: List[float]
    n_t: List[int] = Field(description="Number of time cells used for each horizon")
    mu_errors: List[float] = Field(description="L1((0,1) x torus) distance of mu^T to m-bar")
    psi_errors: List[float] = Field(
        description="L1((delta,1) x torus) distance of psi^T/T to lambda-bar (1 - s)"
    )
    mu_errors_l2: List[float] = Field(description="L2 counterpart of mu_errors")
    psi_errors_l2: List[float] = Field(description="L2 counterpart of psi_errors")
    energy_lhs: List[float] = Field(
        description="Energy-inequality LHS against the stationary comparison solution"
    )
    converged: List[bool] = Field(description="Whether each horizon met the solver certificate")
    mu_slope: Optional[float] = Field(default=None, description="Fitted slope of log mu_error vs log T")
    psi_slope: Optional[float] = Field(default=None, description="Fitted slope of log psi_error vs log T")
    lambda_bar: float = Field(description="Ergodic constant used as the limit")
    delta: float = Field(default=0.1, gt=0.0, lt=1.0, description="Left end of the psi comparison window")
    psi_sign: int = Field(
        default=1, description="+1 when psi^T/T is closer to lambda-bar (1-s) than to its negative"
    )

    @model_validator(mode="after")
    def _aligned(self) -> "LongTimeReport":
        size = len(self.horizons)
        columns = (
            self.n_t,
            self.mu_errors,
            self.psi_errors,
            self.mu_errors_l2,
            self.psi_errors_l2,
            self.energy_lhs,
            self.converged,
        )
        if any(len(column) != size for column in columns):
            raise ValueError("long-time report columns must align with horizons")
        return self

    @property
    def complete(self) -> bool:
        return all(self.converged)
