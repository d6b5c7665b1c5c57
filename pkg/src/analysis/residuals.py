from __future__ import annotations

import numpy as np

from src.functionals import hj_operator_arrays
from src.grid import Grid, continuity_residual_arrays, spatial_gradient
from src.model import ModelSpec, fenchel_young_defect
from src.solver import SolutionBundle

from .exceptions import GridMismatch
from .models import ResidualReport

SUPPORT_THRESHOLD = 1e-10


def support_mask(m: np.ndarray, threshold: float = SUPPORT_THRESHOLD) -> np.ndarray:
    """Cells where m exceeds ``threshold`` times its maximum."""
    return m > threshold * max(float(np.max(m)), 0.0)


def _coupling(m: np.ndarray, model: ModelSpec) -> np.ndarray:
    # log coupling gives -inf where m = 0
    with np.errstate(divide="ignore"):
        return model.f(np.maximum(m, 0.0))


def weak_solution_residuals(
    bundle: SolutionBundle,
    model: ModelSpec,
    grid: Grid,
    support_threshold: float = SUPPORT_THRESHOLD,
) -> ResidualReport:
    """Discrete defects of the HJ inequality, the integral identity, the continuity equation and phi(T) <= phi_T."""
    if not (bundle.grid.same_as(grid) and bundle.m.grid.same_as(grid)):
        raise GridMismatch("bundle fields do not live on the given grid")
    phi = bundle.phi.values
    m = bundle.m.values
    w = bundle.w.values
    cell = grid.h_t * grid.cell_volume

    alpha = hj_operator_arrays(phi, model, grid)
    coupling = _coupling(m, model)
    support = support_mask(m, support_threshold)
    excess = np.maximum(alpha - coupling, 0.0)
    hj_support = float(np.max(np.where(support, excess, 0.0)))
    hj_global = float(np.max(excess))

    grad = spatial_gradient(phi[:-1], grid.d, grid.h_x)
    pairing = np.sum(grad * model.DpH(grad), axis=model.component_axis())
    with np.errstate(invalid="ignore"):
        integrand = np.where(support, m * (model.H(grad) - pairing - coupling), 0.0)
    boundary = float(np.sum(model.phi_T * m[-1] - phi[0] * model.m0)) * grid.cell_volume
    identity_gap = abs(float(np.sum(integrand)) * cell - boundary)

    continuity = continuity_residual_arrays(m, w, model.m0, grid)
    terminal = float(np.max(np.maximum(phi[-1] - model.phi_T, 0.0)))
    fenchel_young = float(np.sum(fenchel_young_defect(model, m, alpha))) * cell

    return ResidualReport(
        hj_violation_support=hj_support,
        hj_violation_global=hj_global,
        identity_gap=identity_gap,
        continuity_residual=continuity.residual,
        mass_drift=continuity.mass_drift,
        terminal_violation=terminal,
        fenchel_young_gap=max(fenchel_young, 0.0),
        support_threshold=support_threshold,
    )
