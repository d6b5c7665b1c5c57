"""Named analytic presets for the spatial inputs (c, V, a, m0, phi_T)."""

from __future__ import annotations

from typing import Annotated, List, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.grid import Grid


class _Preset(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ZeroPreset(_Preset):
    kind: Literal["zero"] = "zero"

    def expand(self, grid: Grid) -> np.ndarray:
        return np.zeros(grid.spatial_shape)


class ConstantPreset(_Preset):
    kind: Literal["constant"] = "constant"
    value: float = Field(description="Value taken at every point")

    def expand(self, grid: Grid) -> np.ndarray:
        return np.full(grid.spatial_shape, self.value)


class CosinePreset(_Preset):
    """offset + amplitude * sum_i cos(2 pi frequency x_i)."""

    kind: Literal["cosine"] = "cosine"
    amplitude: float
    frequency: float = Field(default=1.0, description="Integer frequencies keep the field periodic")
    offset: float = 0.0

    def expand(self, grid: Grid) -> np.ndarray:
        total = np.zeros(grid.spatial_shape)
        for axis in grid.coordinates():
            total += np.cos(2.0 * np.pi * self.frequency * axis)
        return self.offset + self.amplitude * total


class ArrayPreset(_Preset):
    kind: Literal["array"] = "array"
    values: List[float] = Field(description="n_x^d values in C order")

    def expand(self, grid: Grid) -> np.ndarray:
        return np.asarray(self.values, dtype=float).reshape(grid.spatial_shape)


FieldPreset = Annotated[
    Union[ZeroPreset, ConstantPreset, CosinePreset, ArrayPreset],
    Field(discriminator="kind"),
]
