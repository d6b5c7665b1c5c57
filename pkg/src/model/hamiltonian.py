from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

import numpy as np

from .exceptions import ModelSpecError

Index = Optional[Union[int, Tuple[int, ...]]]


def component_axis(x: Index, d: int) -> int:
    """Axis holding the d vector components.

    Pointwise evaluation (``x`` given) takes a bare d-vector, otherwise the
    components sit right before the d trailing spatial axes.
    """
    return -1 if x is not None else -(d + 1)


def at(values: np.ndarray, x: Index) -> np.ndarray:
    """Spatial weight array, or its entry at grid index ``x``."""
    if x is None:
        return values
    return values[x]


@dataclass(frozen=True, slots=True)
class HamiltonianSpec:
    """Power-law Hamiltonian H(x, p) = c(x) |p|^r / r - V(x)."""

    exponent: float
    weight: np.ndarray = field(repr=False)
    potential: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        weight = np.asarray(self.weight, dtype=float)
        potential = np.asarray(self.potential, dtype=float)
        if not self.exponent > 1.0:
            raise ModelSpecError(f"Hamiltonian exponent r must be > 1, got {self.exponent}")
        if weight.shape != potential.shape:
            raise ModelSpecError(
                f"weight c and potential V must share a shape, got {weight.shape} and {potential.shape}"
            )
        if not np.all(np.isfinite(weight)) or np.min(weight) <= 0.0:
            raise ModelSpecError("weight c must be finite and bounded below by c_min > 0")
        if not np.all(np.isfinite(potential)):
            raise ModelSpecError("potential V must be finite")
        object.__setattr__(self, "weight", weight)
        object.__setattr__(self, "potential", potential)

    @property
    def d(self) -> int:
        return self.weight.ndim

    @property
    def conjugate_exponent(self) -> float:
        """r' = r / (r - 1)."""
        return self.exponent / (self.exponent - 1.0)

    @property
    def c_min(self) -> float:
        return float(np.min(self.weight))

    def _norm(self, p: np.ndarray, x: Index) -> np.ndarray:
        return np.linalg.norm(np.asarray(p, dtype=float), axis=component_axis(x, self.d))

    def value(self, p: np.ndarray, x: Index = None) -> np.ndarray:
        r = self.exponent
        return at(self.weight, x) * self._norm(p, x) ** r / r - at(self.potential, x)

    def conjugate(self, q: np.ndarray, x: Index = None) -> np.ndarray:
        """H*(x, q) = c^{1-r'} |q|^{r'} / r' + V."""
        rc = self.conjugate_exponent
        c = at(self.weight, x)
        return c ** (1.0 - rc) * self._norm(q, x) ** rc / rc + at(self.potential, x)

    def gradient(self, p: np.ndarray, x: Index = None) -> np.ndarray:
        """D_pH = c |p|^{r-2} p, set to 0 at p = 0."""
        p = np.asarray(p, dtype=float)
        axis = component_axis(x, self.d)
        norm = np.linalg.norm(p, axis=axis)
        with np.errstate(divide="ignore", invalid="ignore"):
            scale = np.where(norm > 0.0, at(self.weight, x) * norm ** (self.exponent - 2.0), 0.0)
        return np.expand_dims(scale, axis) * p

    def growth_constant(self) -> float:
        """A constant C with (1/(rC))|p|^r - C <= H <= (C/r)|p|^r + C, and the same for H*."""
        c_max = float(np.max(self.weight))
        v_abs = float(np.max(np.abs(self.potential)))
        rc = self.conjugate_exponent
        # H* carries c^{1-r'}, whose extremes come from c_min and c_max.
        conj_weights = (self.c_min ** (1.0 - rc), c_max ** (1.0 - rc))
        candidates = [1.0, 1.0 / self.c_min, c_max, v_abs]
        candidates += [max(cw, 1.0 / cw) for cw in conj_weights]
        return float(max(candidates))
