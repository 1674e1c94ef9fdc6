"""CSV tables: RFC-4180 via ``csv``, '.' decimal separator, exact float repr."""

from __future__ import annotations

import csv
import logging
from pathlib import Path
from typing import Annotated, Iterable, Mapping, Sequence

import numpy as np
from pydantic import Field

logger = logging.getLogger(__name__)


def _cell(value):
    if isinstance(value, (bool, np.bool_)):
        return int(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return repr(float(value))
    return value


def write_table(
    path: Annotated[Path, Field(description="Output CSV file")],
    header: Annotated[Sequence[str], Field(description="Column names, with units in brackets")],
    rows: Annotated[Iterable[Sequence], Field(description="Row values in header order")],
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    logger.info("Wrote %s", path)
    return path


def write_records(path: Path, records: Sequence[Mapping]) -> Path:
    """Dict rows sharing the keys of the first record."""
    if not records:
        raise ValueError(f"no records to write to {path}")
    header = list(records[0].keys())
    return write_table(path, header, ([r[k] for k in header] for r in records))


def read_table(path: Path) -> tuple[list[str], np.ndarray]:
    """Header and float body of a numeric CSV."""
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        body = np.array([[float(v) for v in row] for row in reader], dtype=float)
    return header, body.reshape(-1, len(header))


def write_series(
    path: Annotated[Path, Field(description="Output CSV file")],
    coordinates: Annotated[np.ndarray, Field(description="Sample locations (P, d) or (P,)")],
    values: Annotated[np.ndarray, Field(description="Complex samples (P,)")],
    axis: Annotated[str, Field(description="Coordinate name")] = "xi",
    unit: Annotated[str, Field(description="Coordinate unit")] = "cycles/unit",
) -> Path:
    """Complex samples as (coordinate columns, re, im)."""
    coords = np.asarray(coordinates, dtype=float)
    coords = coords.reshape(coords.shape[0], -1)
    values = np.asarray(values, dtype=complex).reshape(-1)
    if coords.shape[0] != values.shape[0]:
        raise ValueError(f"{coords.shape[0]} coordinates for {values.shape[0]} values")
    d = coords.shape[1]
    names = [f"{axis} [{unit}]"] if d == 1 else [f"{axis}{k + 1} [{unit}]" for k in range(d)]
    rows = (list(c) + [v.real, v.imag] for c, v in zip(coords, values))
    return write_table(path, names + ["re", "im"], rows)


def write_matrix(
    path: Annotated[Path, Field(description="Output CSV file")],
    matrix: Annotated[np.ndarray, Field(description="Complex square matrix")],
) -> Path:
    """Matrix entries as (row, col, re, im)."""
    matrix = np.asarray(matrix, dtype=complex)
    n, m = matrix.shape
    rows = ((i, j, matrix[i, j].real, matrix[i, j].imag) for i in range(n) for j in range(m))
    return write_table(path, ["row", "col", "re", "im"], rows)


def read_matrix(path: Path) -> np.ndarray:
    _, body = read_table(path)
    n = int(body[:, 0].max()) + 1
    m = int(body[:, 1].max()) + 1
    out = np.zeros((n, m), dtype=complex)
    out[body[:, 0].astype(int), body[:, 1].astype(int)] = body[:, 2] + 1j * body[:, 3]
    return out
