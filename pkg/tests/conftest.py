from __future__ import annotations

import sys
from pathlib import Path
from typing import Callable, Optional

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from src.grid import Grid  # noqa: E402
from src.model import CouplingFamily, CouplingSpec, HamiltonianSpec, ModelSpec  # noqa: E402

ModelFactory = Callable[..., ModelSpec]


def _build_model(
    grid: Grid,
    r: float = 2.0,
    q: Optional[float] = 2.0,
    potential: Optional[np.ndarray] = None,
    m0: Optional[np.ndarray] = None,
    phi_T: Optional[np.ndarray] = None,
    family: CouplingFamily = CouplingFamily.POWER,
    coupling_weight: Optional[np.ndarray] = None,
    hamiltonian_weight: Optional[np.ndarray] = None,
) -> ModelSpec:
    shape = grid.spatial_shape
    ones = np.ones(shape)
    return ModelSpec(
        hamiltonian=HamiltonianSpec(
            exponent=r,
            weight=ones if hamiltonian_weight is None else hamiltonian_weight,
            potential=np.zeros(shape) if potential is None else potential,
        ),
        coupling=CouplingSpec(
            family=family,
            weight=ones if coupling_weight is None else coupling_weight,
            exponent=None if family is CouplingFamily.LOG else q,
        ),
        m0=ones if m0 is None else m0,
        phi_T=np.zeros(shape) if phi_T is None else phi_T,
    )


@pytest.fixture
def model_factory() -> ModelFactory:
    """Builds models on a grid; defaults give the reference model (r = q = 2, V = 0, m0 = 1, phi_T = 0)."""
    return _build_model


@pytest.fixture
def small_grid() -> Grid:
    return Grid(d=1, n_x=8, n_t=8, horizon=1.0)


@pytest.fixture
def reference_model(small_grid: Grid) -> ModelSpec:
    return _build_model(small_grid)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
