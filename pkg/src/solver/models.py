from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field

from src.functionals import DualState, ErgodicState, PrimalState
from src.grid import Grid, ScalarField, VectorField
from src.model import AssumptionReport


class GapRecord(BaseModel):
    """Certificate evaluated at one checkpoint of the iteration."""

    iteration: int = Field(ge=0, description="Iteration count at the checkpoint")
    primal: float = Field(description="Primal objective A (or A_erg)")
    dual: float = Field(description="Dual objective B (or B_erg)")
    gap: float = Field(description="A + B")
    relative_gap: float = Field(description="|A + B| / (1 + |A| + |B|)")
    feasibility: float = Field(
        description="Continuity residual (time-dependent) or divergence residual (ergodic)"
    )
    mass_drift: float = Field(default=0.0, description="Largest deviation of the mass from 1")

    def merit(self) -> float:
        return self.relative_gap + self.feasibility + self.mass_drift


class ConvergenceSummary(BaseModel):
    converged: bool
    iterations: int
    final_gap: Optional[float] = None
    final_relative_gap: Optional[float] = None
    final_feasibility: Optional[float] = None


def _summary(history: List[GapRecord], converged: bool, iterations: int) -> ConvergenceSummary:
    if not history:
        return ConvergenceSummary(converged=converged, iterations=iterations)
    last = history[-1]
    return ConvergenceSummary(
        converged=converged,
        iterations=iterations,
        final_gap=last.gap,
        final_relative_gap=last.relative_gap,
        final_feasibility=last.feasibility,
    )


@dataclass(slots=True)
class SolutionBundle:
    """Approximate saddle point of the time-dependent problem with its certificate trail."""

    grid: Grid
    phi: ScalarField
    alpha: ScalarField
    m: ScalarField
    w: VectorField
    gap_history: List[GapRecord] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    complementarity: float = 0.0
    assumption_report: Optional[AssumptionReport] = None

    def primal_state(self) -> PrimalState:
        return PrimalState(phi=self.phi, alpha=self.alpha)

    def dual_state(self) -> DualState:
        return DualState(m=self.m, w=self.w)

    def summary(self) -> ConvergenceSummary:
        return _summary(self.gap_history, self.converged, self.iterations)


@dataclass(slots=True)
class ErgodicSolution:
    """Approximate stationary quadruple (lambda, phi, m, w) with its certificate trail."""

    grid: Grid
    lam: float
    phi: np.ndarray = field(repr=False)
    m: np.ndarray = field(repr=False)
    w: np.ndarray = field(repr=False)
    gap_history: List[GapRecord] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    assumption_report: Optional[AssumptionReport] = None

    def state(self) -> ErgodicState:
        return ErgodicState(lam=self.lam, phi=self.phi, m=self.m, w=self.w)

    def summary(self) -> ConvergenceSummary:
        return _summary(self.gap_history, self.converged, self.iterations)
