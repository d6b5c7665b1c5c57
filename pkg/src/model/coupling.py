from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .exceptions import ModelSpecError
from .hamiltonian import Index, at


class CouplingFamily(str, Enum):
    """Supported local couplings f(x, m)."""

    POWER = "power"
    LOG = "log"


@dataclass(frozen=True, slots=True)
class CouplingSpec:
    """Local coupling: f = a(x) m^{q-1} (power) or f = ln m (log).

    F is the primitive of f normalised by F(x, 1) = 0, extended by +inf for
    m < 0; F* is its conjugate sup_{m >= 0} m alpha - F(x, m).
    """

    family: CouplingFamily
    weight: np.ndarray = field(repr=False)
    exponent: Optional[float] = None

    def __post_init__(self) -> None:
        weight = np.asarray(self.weight, dtype=float)
        if not np.all(np.isfinite(weight)) or np.min(weight) <= 0.0:
            raise ModelSpecError("coupling weight a must be finite and bounded below by a_min > 0")
        if self.family is CouplingFamily.POWER:
            if self.exponent is None or not self.exponent > 1.0:
                raise ModelSpecError(f"power coupling needs q > 1, got {self.exponent}")
        object.__setattr__(self, "weight", weight)

    @property
    def conjugate_exponent(self) -> Optional[float]:
        """p = q / (q - 1); None for the log family."""
        if self.family is CouplingFamily.LOG:
            return None
        q = float(self.exponent)
        return q / (q - 1.0)

    def f(self, m: np.ndarray, x: Index = None) -> np.ndarray:
        m = np.asarray(m, dtype=float)
        if self.family is CouplingFamily.LOG:
            with np.errstate(divide="ignore"):
                return np.log(m)
        return at(self.weight, x) * np.maximum(m, 0.0) ** (self.exponent - 1.0)

    def f_inverse(self, value: np.ndarray, x: Index = None) -> np.ndarray:
        """Density with f(x, m) = value, clipped to m = 0 below f(x, 0)."""
        value = np.asarray(value, dtype=float)
        if self.family is CouplingFamily.LOG:
            return np.exp(value)
        ratio = np.maximum(value, 0.0) / at(self.weight, x)
        return ratio ** (1.0 / (self.exponent - 1.0))

    def F(self, m: np.ndarray, x: Index = None) -> np.ndarray:
        m = np.asarray(m, dtype=float)
        safe = np.maximum(m, 0.0)
        if self.family is CouplingFamily.LOG:
            with np.errstate(divide="ignore", invalid="ignore"):
                entropy = np.where(safe > 0.0, safe * np.log(safe), 0.0)
            value = entropy - safe + 1.0
        else:
            q = self.exponent
            value = at(self.weight, x) * (safe**q - 1.0) / q
        return np.where(m < 0.0, np.inf, value)

    def F_star(self, alpha: np.ndarray, x: Index = None) -> np.ndarray:
        alpha = np.asarray(alpha, dtype=float)
        if self.family is CouplingFamily.LOG:
            return np.expm1(alpha)
        q = self.exponent
        p = self.conjugate_exponent
        a = at(self.weight, x)
        positive = np.maximum(alpha, 0.0)
        return positive / p * (positive / a) ** (1.0 / (q - 1.0)) + a / q

    def F_star_subgradient(self, alpha: np.ndarray, x: Index = None) -> np.ndarray:
        """argmax_{m >= 0} m alpha - F(x, m), i.e. dF*/dalpha."""
        alpha = np.asarray(alpha, dtype=float)
        if self.family is CouplingFamily.LOG:
            return np.exp(alpha)
        return self.f_inverse(alpha, x)

    def F_star_curvature(self, alpha: np.ndarray, x: Index = None) -> np.ndarray:
        """d^2 F*/d alpha^2 where it exists; 0 on the flat branch alpha <= 0."""
        alpha = np.asarray(alpha, dtype=float)
        if self.family is CouplingFamily.LOG:
            return np.exp(alpha)
        q = self.exponent
        a = at(self.weight, x)
        positive = np.maximum(alpha, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            slope = (positive / a) ** ((2.0 - q) / (q - 1.0)) / ((q - 1.0) * a)
        return np.where(alpha > 0.0, slope, 0.0)

    def growth_constant(self) -> Optional[float]:
        """A constant C satisfying the power-law growth sandwiches of f, F and F*."""
        if self.family is CouplingFamily.LOG:
            return None
        a_min = float(np.min(self.weight))
        a_max = float(np.max(self.weight))
        p = self.conjugate_exponent
        q = float(self.exponent)
        # F* = a^{1-p} alpha^p / p + a / q on alpha >= 0.
        conj = (a_min ** (1.0 - p), a_max ** (1.0 - p))
        candidates = [1.0, 1.0 / a_min, a_max, a_max / q]
        candidates += [max(cw, 1.0 / cw) for cw in conj]
        return float(max(candidates))
