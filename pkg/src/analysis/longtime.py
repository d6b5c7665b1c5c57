from __future__ import annotations

import math
from typing import List, Optional, Sequence

import numpy as np
from scipy.interpolate import interp1d

from src.functionals import ErgodicState
from src.grid import Grid, Placement, ScalarField
from src.logger import get_solver_logger
from src.model import ModelSpec
from src.solver import NonConvergence, SolutionBundle, SolverOptions, solve_ergodic, solve_time_dependent

from .energy import energy_inequality_check
from .exceptions import WrongFamily
from .models import LongTimeReport
from .oracle import explicit_ergodic_oracle, stationary_bundle

PSI_WINDOW_START = 0.1

_logger = get_solver_logger("analysis.longtime")


def rescale_to_unit_time(field: ScalarField, horizon: Optional[float] = None, n_t: Optional[int] = None) -> ScalarField:
    """Field on (0, T) seen on (0, 1) through s = t / T.

    Without ``n_t`` (or with the field's own n_t) this is a pure reindexing;
    otherwise values are linearly interpolated in time, clamped at the ends.
    """
    grid = field.grid
    horizon = grid.horizon if horizon is None else float(horizon)
    target = grid.with_time(grid.n_t if n_t is None else n_t, 1.0)
    if target.n_t == grid.n_t:
        return ScalarField(grid=target, placement=field.placement, values=field.values.copy())

    if field.placement is Placement.TIME_NODE:
        source, dest = grid.node_times(), target.node_times()
    else:
        source, dest = grid.cell_times(), target.cell_times()
    values = field.values
    interpolant = interp1d(
        source / horizon,
        values,
        axis=0,
        bounds_error=False,
        fill_value=(values[0], values[-1]),
        assume_sorted=True,
    )
    return ScalarField(grid=target, placement=field.placement, values=interpolant(dest))


def _norms(diff: np.ndarray, weight: float) -> tuple[float, float]:
    l1 = float(np.sum(np.abs(diff))) * weight
    l2 = math.sqrt(float(np.sum(diff * diff)) * weight)
    return l1, l2


def _fit_slope(horizons: Sequence[float], errors: Sequence[float]) -> Optional[float]:
    """Slope of log(error) against log(T), over the strictly positive errors."""
    points = [(math.log(t), math.log(e)) for t, e in zip(horizons, errors) if e > 0.0]
    if len(points) < 2:
        return None
    xs, ys = zip(*points)
    return float(np.polyfit(xs, ys, 1)[0])


def ergodic_reference(model: ModelSpec, grid: Grid, opts: Optional[SolverOptions] = None) -> ErgodicState:
    """Closed-form ergodic solution when the model allows it, the ergodic solver otherwise."""
    try:
        lam, m_bar = explicit_ergodic_oracle(model, grid)
    except WrongFamily:
        solution = solve_ergodic(model, grid, opts)
        return solution.state()
    zeros = np.zeros(grid.spatial_shape)
    return ErgodicState(lam=lam, phi=zeros, m=m_bar, w=np.zeros((grid.d, *grid.spatial_shape)))


def long_time_experiment(
    model: ModelSpec,
    grid: Grid,
    horizons: Sequence[float],
    opts: Optional[SolverOptions] = None,
    ergodic: Optional[ErgodicState] = None,
    delta: float = PSI_WINDOW_START,
) -> LongTimeReport:
    """Solve on growing horizons with the time step of ``grid`` and measure the distance to the ergodic limit.

    A horizon whose solve does not converge contributes its best iterate and
    is flagged in ``converged``.
    """
    horizons = [float(t) for t in horizons]
    if any(b <= a for a, b in zip(horizons, horizons[1:])):
        raise ValueError("horizons must be strictly increasing")
    reference = ergodic if ergodic is not None else ergodic_reference(model, grid, opts)
    lam_bar = reference.lam
    m_bar = reference.m
    cell = grid.cell_volume

    n_ts: List[int] = []
    mu_l1: List[float] = []
    mu_l2: List[float] = []
    psi_l1: List[float] = []
    psi_l2: List[float] = []
    psi_flipped: List[float] = []
    energy: List[float] = []
    converged: List[bool] = []
    for horizon in horizons:
        n_t = max(1, int(round(horizon / grid.h_t)))
        local = grid.with_time(n_t, horizon)
        _logger.info(f"Long-time horizon T={horizon:g} with n_t={n_t}")
        try:
            bundle: SolutionBundle = solve_time_dependent(model, local, opts)
            ok = True
        except NonConvergence as exc:
            if exc.bundle is None:
                raise
            bundle, ok = exc.bundle, False

        mu = rescale_to_unit_time(bundle.m, horizon)
        l1, l2 = _norms(mu.values - m_bar[None], cell / n_t)

        psi = rescale_to_unit_time(bundle.phi, horizon)
        s = psi.grid.node_times()
        window = s > delta
        limit = lam_bar * (1.0 - s[window]).reshape((-1,) + (1,) * grid.d)
        scaled = psi.values[window] / horizon
        p1, p2 = _norms(scaled - limit, cell / n_t)
        flipped, _ = _norms(scaled + limit, cell / n_t)

        comparison = stationary_bundle(reference, model, local)
        lhs = energy_inequality_check(bundle, comparison, model, local).lhs if n_t >= 2 else 0.0

        n_ts.append(n_t)
        mu_l1.append(l1)
        mu_l2.append(l2)
        psi_l1.append(p1)
        psi_l2.append(p2)
        psi_flipped.append(flipped)
        energy.append(lhs)
        converged.append(ok)
        _logger.info(f"T={horizon:g}: mu L1 error {l1:.4e}, psi L1 error {p1:.4e}")

    sign = 1 if not psi_l1 or psi_l1[-1] <= psi_flipped[-1] else -1
    return LongTimeReport(
        horizons=horizons,
        n_t=n_ts,
        mu_errors=mu_l1,
        psi_errors=psi_l1,
        mu_errors_l2=mu_l2,
        psi_errors_l2=psi_l2,
        energy_lhs=energy,
        converged=converged,
        mu_slope=_fit_slope(horizons, mu_l1),
        psi_slope=_fit_slope(horizons, psi_l1),
        lambda_bar=lam_bar,
        delta=delta,
        psi_sign=sign,
    )
