from __future__ import annotations

import math
from typing import Optional

from pydantic import BaseModel, Field

from .exceptions import AssumptionViolation
from .spec import ModelSpec

EXPONENT_RELATION = "r > max{d(q-1),1}"


class AssumptionReport(BaseModel):
    """Exponents and growth constants of a model, with the exponent-relation verdict."""

    d: int = Field(ge=1, le=2, description="Spatial dimension")
    r: float = Field(gt=1.0, description="Growth exponent of H in p")
    r_conjugate: float = Field(gt=1.0, description="Conjugate exponent r' = r/(r-1)")
    q: Optional[float] = Field(
        default=None, description="Growth exponent of F (None for the log coupling)"
    )
    p: Optional[float] = Field(
        default=None, description="Conjugate exponent p = q/(q-1) (None for the log coupling)"
    )
    relation_holds: bool = Field(description=f"Whether {EXPONENT_RELATION} holds")
    relation: str = Field(default=EXPONENT_RELATION, description="The checked inequality")
    nu: float = Field(description="Holder-in-time exponent (r-d(q-1))/(d(q-1)(r-1)+rq)")
    flux_exponent: Optional[float] = Field(
        default=None,
        description="Integrability exponent r'q/(r'+q-1) of the ergodic flux",
    )
    hamiltonian_constant: float = Field(
        gt=0.0, description="Constant C of the growth bounds on H and H*"
    )
    coupling_constant: Optional[float] = Field(
        default=None, description="Constant C of the growth bounds on f, F and F*"
    )


def holder_exponent(r: float, q: Optional[float], d: int) -> float:
    """Holder-in-time exponent of the value function; the log coupling is the q -> 1 limit."""
    growth = 0.0 if q is None else d * (q - 1.0)
    q_eff = 1.0 if q is None else q
    return (r - growth) / (growth * (r - 1.0) + r * q_eff)


def check_assumptions(model: ModelSpec, d: Optional[int] = None, strict: bool = True) -> AssumptionReport:
    """Report exponents and growth constants; raise when the exponent relation fails.

    The log coupling behaves like q - 1 arbitrarily small and always passes.
    """
    d = model.d if d is None else d
    r = model.r
    q = model.q
    if q is None:
        holds = r > 1.0
        flux_exponent = None
    else:
        holds = r > max(d * (q - 1.0), 1.0)
        rc = model.r_conjugate
        flux_exponent = rc * q / (rc + q - 1.0)
    report = AssumptionReport(
        d=d,
        r=r,
        r_conjugate=model.r_conjugate,
        q=q,
        p=model.p,
        relation_holds=holds,
        nu=holder_exponent(r, q, d),
        flux_exponent=flux_exponent,
        hamiltonian_constant=model.hamiltonian.growth_constant(),
        coupling_constant=model.coupling.growth_constant(),
    )
    if strict and not holds:
        if q is None:
            message = f"exponent relation {EXPONENT_RELATION} fails: r = {r:g}"
        else:
            bound = max(d * (q - 1.0), 1.0)
            message = (
                f"exponent relation {EXPONENT_RELATION} fails: r = {r:g} <= {bound:g} "
                f"(d = {d}, q = {q:g})"
            )
        raise AssumptionViolation(message)
    if not math.isfinite(report.nu):
        raise AssumptionViolation(f"Holder exponent is not finite for r = {r:g}, q = {q}")
    return report
