from __future__ import annotations

from typing import TYPE_CHECKING, Optional

if TYPE_CHECKING:
    from .models import ErgodicSolution, SolutionBundle


class InfeasibleInput(ValueError):
    """Raised when boundary data are inconsistent (e.g. m0 without unit mass)."""


class StepSizeError(ValueError):
    """Raised when sigma * tau * ||K||^2 > 1."""


class InnerProxFailure(RuntimeError):
    """Raised when the cell-wise prox root-find does not converge; usually steps are too large."""


class NonConvergence(RuntimeError):
    """Raised when the duality-gap certificate is not met within max_iters.

    Carries the best iterate so callers can still report or export it.
    """

    def __init__(
        self,
        message: str,
        *,
        bundle: Optional["SolutionBundle"] = None,
        solution: Optional["ErgodicSolution"] = None,
    ) -> None:
        super().__init__(message)
        self.bundle = bundle
        self.solution = solution
