"""Bit-stable export of fields.

CSV: header ``t,x0[,x1],value`` (``value0..value{d-1}`` for fluxes, no ``t``
column for fields on the torus alone), one row per point in lexicographic
(t, x) order, 17 significant digits.

binary-f64: 32-byte header (magic ``MFGF``, format version, number of
dimensions, shape padded to five entries; all little-endian uint32) followed
by the values as little-endian float64 in C order.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field

from src.grid import Grid, Placement, ScalarField, VectorField

from .exceptions import ExportFormatError

MAGIC = b"MFGF"
FORMAT_VERSION = 1
HEADER = struct.Struct("<4sII5I")
MAX_DIMS = 5
CSV_FORMAT = "%.17g"


class ExportFormat(str, Enum):
    CSV = "csv"
    BINARY = "binary-f64"

    @property
    def suffix(self) -> str:
        return ".csv" if self is ExportFormat.CSV else ".bin"


@dataclass(frozen=True, slots=True)
class TorusField:
    """Time-independent field on the torus: shape S (scalar) or (d, *S) (vector)."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    @property
    def is_vector(self) -> bool:
        return np.ndim(self.values) == self.grid.d + 1


Exportable = Union[ScalarField, VectorField, TorusField]


class ExportedFile(BaseModel):
    path: str
    format: str = Field(description="csv, binary-f64 or json")
    size_bytes: int = Field(ge=0)
    rows: int = Field(ge=0, description="Data rows (CSV) or stored values (binary)")


@dataclass(frozen=True, slots=True)
class ImportedField:
    values: np.ndarray
    columns: Tuple[str, ...] = ()


def _times(item: Exportable) -> Optional[np.ndarray]:
    if isinstance(item, TorusField):
        return None
    if isinstance(item, ScalarField) and item.placement is Placement.TIME_NODE:
        return item.grid.node_times()
    return item.grid.cell_times()


def _table(item: Exportable) -> Tuple[List[str], np.ndarray]:
    """CSV header and rows (coordinates then value columns)."""
    grid = item.grid
    values = np.asarray(item.values, dtype=float)
    times = _times(item)
    vector = isinstance(item, VectorField) or (isinstance(item, TorusField) and item.is_vector)
    if vector:
        component_axis = 0 if times is None else 1
        values = np.moveaxis(values, component_axis, -1)
    else:
        values = values[..., None]

    axis = np.arange(grid.n_x) * grid.h_x
    axes = ([times] if times is not None else []) + [axis] * grid.d
    coords = np.meshgrid(*axes, indexing="ij")
    names = (["t"] if times is not None else []) + [f"x{i}" for i in range(grid.d)]
    width = values.shape[-1]
    names += ["value"] if not vector else [f"value{i}" for i in range(width)]
    columns = [c.ravel() for c in coords] + [values.reshape(-1, width)[:, i] for i in range(width)]
    return names, np.column_stack(columns)


def _write_binary(values: np.ndarray, path: Path) -> None:
    if values.ndim > MAX_DIMS:
        raise ExportFormatError(f"binary export supports up to {MAX_DIMS} dimensions, got {values.ndim}")
    shape = list(values.shape) + [0] * (MAX_DIMS - values.ndim)
    with path.open("wb") as fh:
        fh.write(HEADER.pack(MAGIC, FORMAT_VERSION, values.ndim, *shape))
        fh.write(np.ascontiguousarray(values, dtype="<f8").tobytes())


def export_field(item: Exportable, path: Union[str, Path], fmt: ExportFormat) -> ExportedFile:
    """Write ``item`` to ``path`` in the requested format."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fmt = ExportFormat(fmt)
    if fmt is ExportFormat.CSV:
        names, rows = _table(item)
        np.savetxt(path, rows, fmt=CSV_FORMAT, delimiter=",", header=",".join(names), comments="")
        count = rows.shape[0]
    else:
        values = np.asarray(item.values, dtype=float)
        _write_binary(values, path)
        count = int(values.size)
    return ExportedFile(path=str(path), format=fmt.value, size_bytes=path.stat().st_size, rows=count)


def _read_binary(path: Path) -> np.ndarray:
    raw = path.read_bytes()
    if len(raw) < HEADER.size:
        raise ExportFormatError(f"{path} is shorter than the binary header")
    magic, version, ndim, *shape = HEADER.unpack_from(raw)
    if magic != MAGIC or version != FORMAT_VERSION:
        raise ExportFormatError(f"{path} is not a version-{FORMAT_VERSION} field file")
    shape = tuple(shape[:ndim])
    data = np.frombuffer(raw, dtype="<f8", offset=HEADER.size)
    if data.size != int(np.prod(shape)):
        raise ExportFormatError(f"{path} holds {data.size} values, header announces {shape}")
    return data.reshape(shape).astype(float)


def _read_csv(path: Path) -> ImportedField:
    with path.open("r", encoding="utf-8") as fh:
        names = tuple(fh.readline().strip().split(","))
    rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    coord_count = sum(1 for name in names if not name.startswith("value"))
    counts = [np.unique(rows[:, i]).size for i in range(coord_count)]
    width = len(names) - coord_count
    values = rows[:, coord_count:].reshape(*counts, width)
    if width == 1:
        values = values[..., 0]
    else:
        has_time = bool(names) and names[0] == "t"
        values = np.moveaxis(values, -1, 1 if has_time else 0)
    return ImportedField(values=np.ascontiguousarray(values), columns=names)


def import_field(path: Union[str, Path]) -> ImportedField:
    """Read a file written by export_field; the format follows the suffix."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Field file not found: {path}")
    if path.suffix == ".csv":
        return _read_csv(path)
    return ImportedField(values=_read_binary(path))


def export_table(header: List[str], rows: np.ndarray, path: Union[str, Path]) -> ExportedFile:
    """Plain numeric table (gap histories, long-time errors) as CSV."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = np.atleast_2d(np.asarray(rows, dtype=float)) if len(rows) else np.empty((0, len(header)))
    np.savetxt(path, rows, fmt=CSV_FORMAT, delimiter=",", header=",".join(header), comments="")
    return ExportedFile(path=str(path), format=ExportFormat.CSV.value, size_bytes=path.stat().st_size, rows=rows.shape[0])
