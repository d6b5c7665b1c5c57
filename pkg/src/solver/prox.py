"""Cell-wise proximal map of g(a, b) = F*(x, -a + H(x, b)).

The minimiser of g(a', b') + (|a' - a|^2 + |b' - b|^2) / (2 s) is
a' = a + s mu, b' = rho b / |b|, where mu >= 0 is the unique root of
mu = dF*(alpha(mu)) and rho solves rho + s mu c rho^(r-1) = |b|.
Both scalar root-finds are safeguarded Newton iterations on a bracket and
run vectorised over all cells at once.
"""

from __future__ import annotations

from typing import Tuple

import numpy as np

from src.model import ModelSpec
from src.model.hamiltonian import Index, at

from .exceptions import InnerProxFailure


def _radius(
    b_norm: np.ndarray,
    shrink: np.ndarray,
    r: float,
    d_shrink: np.ndarray,
    tol: float,
    max_iters: int,
) -> Tuple[np.ndarray, np.ndarray]:
    """Root rho of rho + shrink * rho^(r-1) = |b| and its derivative in mu.

    ``d_shrink`` is d(shrink)/d(mu) = s c.
    """
    if r == 2.0:
        rho = b_norm / (1.0 + shrink)
        return rho, -d_shrink * rho / (1.0 + shrink)

    lo = np.zeros_like(b_norm)
    hi = b_norm.copy()
    rho = b_norm / (1.0 + shrink)
    for _ in range(max_iters):
        g = rho + shrink * rho ** (r - 1.0) - b_norm
        done = np.abs(g) <= tol * (1.0 + b_norm)
        if np.all(done):
            break
        lo = np.where(g < 0.0, rho, lo)
        hi = np.where(g > 0.0, rho, hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = rho - g / (1.0 + shrink * (r - 1.0) * rho ** (r - 2.0))
        inside = np.isfinite(newton) & (newton > lo) & (newton < hi)
        rho = np.where(done, rho, np.where(inside, newton, 0.5 * (lo + hi)))
    else:
        raise InnerProxFailure(f"radial shrink did not converge in {max_iters} iterations")

    with np.errstate(divide="ignore", invalid="ignore"):
        denom = 1.0 + shrink * (r - 1.0) * rho ** (r - 2.0)
        d_rho = np.where(rho > 0.0, -d_shrink * rho ** (r - 1.0) / denom, 0.0)
    return rho, d_rho


def _multiplier(
    a: np.ndarray,
    b: np.ndarray,
    step: float,
    model: ModelSpec,
    x: Index,
    tol: float,
    max_iters: int,
) -> Tuple[np.ndarray, np.ndarray, int]:
    """Multiplier mu = dF*(alpha) and shrink ratio rho / |b| of the prox of step * g at (a, b)."""
    if not step > 0.0:
        raise ValueError(f"prox step must be positive, got {step}")
    s = float(step)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    hamiltonian = model.hamiltonian
    coupling = model.coupling
    r = float(hamiltonian.exponent)
    axis = model.component_axis(x)
    c = at(hamiltonian.weight, x)
    potential = at(hamiltonian.potential, x)

    b_norm = np.linalg.norm(b, axis=axis)
    alpha_start = -a + c * b_norm**r / r - potential
    hi = np.array(coupling.F_star_subgradient(alpha_start, x), dtype=float)
    lo = np.zeros_like(hi)
    mu = np.zeros_like(hi)
    d_shrink = np.broadcast_to(s * c, b_norm.shape)

    for _ in range(max_iters):
        rho, d_rho = _radius(b_norm, mu * d_shrink, r, d_shrink, tol, max_iters)
        alpha = -a - s * mu + c * rho**r / r - potential
        residual = mu - coupling.F_star_subgradient(alpha, x)
        scale = tol * (1.0 + mu)
        done = (np.abs(residual) <= scale) | (hi - lo <= scale)
        if np.all(done):
            break
        lo = np.where(residual < 0.0, mu, lo)
        hi = np.where(residual > 0.0, mu, hi)
        d_alpha = -s + c * rho ** (r - 1.0) * d_rho
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            slope = 1.0 - coupling.F_star_curvature(alpha, x) * d_alpha
            newton = mu - residual / slope
        inside = np.isfinite(newton) & (newton > lo) & (newton < hi)
        mu = np.where(done, mu, np.where(inside, newton, 0.5 * (lo + hi)))
    else:
        worst = float(np.max(np.abs(residual)))
        raise InnerProxFailure(
            f"prox root-find did not converge in {max_iters} iterations (residual {worst:.3e})"
        )

    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(b_norm > 0.0, rho / b_norm, 1.0)
    return mu, ratio, axis


def prox_primal_point(
    a: np.ndarray,
    b: np.ndarray,
    step: float,
    model: ModelSpec,
    x: Index = None,
    tol: float = 1e-10,
    max_iters: int = 60,
) -> Tuple[np.ndarray, np.ndarray]:
    """Proximal point of step * g at (a, b), on one cell (``x`` given) or on all cells.

    Satisfies (a' - a) / step = dF*(x, -a' + H(x, b')) up to ``tol``.
    """
    mu, ratio, axis = _multiplier(a, b, step, model, x, tol, max_iters)
    b = np.asarray(b, dtype=float)
    return np.asarray(a, dtype=float) + float(step) * mu, np.expand_dims(ratio, axis) * b


def moreau_dual_point(
    v_a: np.ndarray,
    v_b: np.ndarray,
    tau: float,
    model: ModelSpec,
    x: Index = None,
    tol: float = 1e-10,
    max_iters: int = 60,
) -> Tuple[np.ndarray, np.ndarray]:
    """Proximal point of tau * g* at (v_a, v_b) through the Moreau identity.

    Equals v - tau * prox_{g / tau}(v / tau), assembled as (-mu, (1 - rho / |b|) v_b)
    so that the first entry is exactly minus the multiplier and the second
    vanishes exactly where the multiplier does.
    """
    if not tau > 0.0:
        raise ValueError(f"dual step must be positive, got {tau}")
    v_b = np.asarray(v_b, dtype=float)
    mu, ratio, axis = _multiplier(
        np.asarray(v_a, dtype=float) / tau, v_b / tau, 1.0 / tau, model, x, tol, max_iters
    )
    return -mu, np.expand_dims(1.0 - ratio, axis) * v_b
