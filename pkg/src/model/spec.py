from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .coupling import CouplingSpec
from .exceptions import ModelSpecError
from .hamiltonian import HamiltonianSpec, Index, component_axis

MASS_TOLERANCE = 1e-8


@dataclass(frozen=True, slots=True)
class ModelSpec:
    """Hamiltonian, coupling and boundary data of one mean field game.

    ``m0`` is the initial density (positive, unit mass for the spatial
    quadrature h_x^d) and ``phi_T`` the terminal value, both sampled on the
    spatial points of the grid.
    """

    hamiltonian: HamiltonianSpec
    coupling: CouplingSpec
    m0: np.ndarray = field(repr=False)
    phi_T: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        m0 = np.asarray(self.m0, dtype=float)
        phi_T = np.asarray(self.phi_T, dtype=float)
        shape = self.hamiltonian.weight.shape
        for name, arr in (("m0", m0), ("phi_T", phi_T), ("coupling weight", self.coupling.weight)):
            if arr.shape != shape:
                raise ModelSpecError(f"{name} must have shape {shape}, got {arr.shape}")
        if not np.all(np.isfinite(phi_T)):
            raise ModelSpecError("phi_T must be finite")
        if not np.all(np.isfinite(m0)) or np.min(m0) <= 0.0:
            raise ModelSpecError("m0 must be finite and strictly positive")
        object.__setattr__(self, "m0", m0)
        object.__setattr__(self, "phi_T", phi_T)

    @property
    def d(self) -> int:
        return self.hamiltonian.d

    @property
    def n_x(self) -> int:
        return self.hamiltonian.weight.shape[0]

    @property
    def r(self) -> float:
        return self.hamiltonian.exponent

    @property
    def r_conjugate(self) -> float:
        return self.hamiltonian.conjugate_exponent

    @property
    def q(self) -> Optional[float]:
        return self.coupling.exponent

    @property
    def p(self) -> Optional[float]:
        return self.coupling.conjugate_exponent

    def initial_mass(self) -> float:
        return float(np.sum(self.m0)) * (1.0 / self.n_x) ** self.d

    def component_axis(self, x: Index = None) -> int:
        return component_axis(x, self.d)

    # Hamiltonian side -------------------------------------------------------

    def H(self, p: np.ndarray, x: Index = None) -> np.ndarray:
        return self.hamiltonian.value(p, x)

    def H_star(self, q: np.ndarray, x: Index = None) -> np.ndarray:
        return self.hamiltonian.conjugate(q, x)

    def L(self, v: np.ndarray, x: Index = None) -> np.ndarray:
        """Lagrangian L(x, v) = H*(x, -v)."""
        return self.hamiltonian.conjugate(-np.asarray(v, dtype=float), x)

    def DpH(self, p: np.ndarray, x: Index = None) -> np.ndarray:
        return self.hamiltonian.gradient(p, x)

    # Coupling side ----------------------------------------------------------

    def f(self, m: np.ndarray, x: Index = None) -> np.ndarray:
        return self.coupling.f(m, x)

    def F(self, m: np.ndarray, x: Index = None) -> np.ndarray:
        return self.coupling.F(m, x)

    def F_star(self, alpha: np.ndarray, x: Index = None) -> np.ndarray:
        return self.coupling.F_star(alpha, x)

    def F_star_subgradient(self, alpha: np.ndarray, x: Index = None) -> np.ndarray:
        return self.coupling.F_star_subgradient(alpha, x)


def fenchel_young_defect(model: ModelSpec, m: np.ndarray, alpha: np.ndarray, x: Index = None) -> np.ndarray:
    """F*(x, alpha) + F(x, m) - alpha m, nonnegative and zero iff m = dF*(alpha)."""
    m = np.asarray(m, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    with np.errstate(invalid="ignore"):
        return model.F_star(alpha, x) + model.F(m, x) - alpha * m
