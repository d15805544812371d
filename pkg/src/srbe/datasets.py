"""Built-in R&D expenditure data and CSV input/output for user data."""

from __future__ import annotations

import csv
import hashlib
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, MissingColumn, ParseError, ValidationError


@dataclass(frozen=True)
class Dataset:
    name: str
    x: np.ndarray
    y: np.ndarray
    column_names: tuple
    response_name: str = "y"

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float).reshape(-1)
        if x.ndim != 2 or x.shape[0] != y.size:
            raise DimensionMismatch(f"x has shape {x.shape} but y has {y.size} rows")
        if len(self.column_names) != x.shape[1]:
            raise DimensionMismatch("column_names must match the number of columns of x")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValidationError("dataset contains non-finite entries")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "column_names", tuple(self.column_names))

    @property
    def shape(self) -> tuple:
        return self.x.shape

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([self.response_name, *self.column_names])
        for yi, row in zip(self.y, self.x):
            writer.writerow([repr(float(yi)), *(repr(float(v)) for v in row)])
        return buf.getvalue()

    def checksum(self) -> str:
        return hashlib.sha256(self.to_csv_text().encode("utf-8")).hexdigest()


_RND_X = (
    (1.9, 2.2, 1.9, 3.7),
    (1.8, 2.2, 2.0, 3.8),
    (1.8, 2.4, 2.1, 3.6),
    (1.8, 2.4, 2.2, 3.8),
    (2.0, 2.5, 2.3, 3.8),
    (2.1, 2.6, 2.4, 3.7),
    (2.1, 2.6, 2.6, 3.8),
    (2.2, 2.6, 2.6, 4.0),
    (2.3, 2.8, 2.8, 3.7),
    (2.3, 2.7, 2.8, 3.8),
)
_RND_Y = (2.3, 2.2, 2.2, 2.3, 2.4, 2.5, 2.6, 2.6, 2.7, 2.7)


def builtin_rnd_dataset() -> Dataset:
    """R&D spending as percent of GNP: US (response) against the former
    Soviet Union, France, West Germany and Japan."""
    return Dataset(
        name="rnd_expenditure",
        x=np.array(_RND_X),
        y=np.array(_RND_Y),
        column_names=("x1_ussr", "x2_france", "x3_west_germany", "x4_japan"),
        response_name="y_usa",
    )


def _parse_number(text: str, row: int, column: str) -> float:
    cell = text.strip()
    if not cell:
        raise ParseError("blank cell", row=row, column=column)
    try:
        value = float(cell)
    except ValueError:
        raise ParseError(f"non-numeric cell {cell!r}", row=row, column=column) from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite cell {cell!r}", row=row, column=column)
    return value


def parse_csv_text(text: str, response_column: str, name: str = "csv") -> Dataset:
    """Parse CSV text with a header row; rows are numbered from 1 after the header."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise ParseError("empty file") from None
    if response_column not in header:
        raise MissingColumn(f"response column {response_column!r} not in header {header}")
    if len(set(header)) != len(header):
        raise ParseError("duplicate column names in header")
    resp_idx = header.index(response_column)
    rows = []
    for line_no, raw in enumerate(reader, start=1):
        if not raw or all(not c.strip() for c in raw):
            continue
        if len(raw) != len(header):
            raise ParseError(f"expected {len(header)} fields, found {len(raw)}", row=line_no)
        rows.append([_parse_number(cell, line_no, header[j]) for j, cell in enumerate(raw)])
    if not rows:
        raise ParseError("no data rows")
    data = np.array(rows)
    predictors = [j for j in range(len(header)) if j != resp_idx]
    return Dataset(
        name=name,
        x=data[:, predictors],
        y=data[:, resp_idx],
        column_names=tuple(header[j] for j in predictors),
        response_name=response_column,
    )


def load_csv(path, response_column: str) -> Dataset:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror or exc}") from None
    return parse_csv_text(text, response_column, name=path.stem)


def write_csv(dataset: Dataset, path) -> Path:
    path = Path(path)
    path.write_text(dataset.to_csv_text(), encoding="utf-8")
    return path


def select_columns(dataset: Dataset, names: Sequence[str]) -> Dataset:
    missing = [n for n in names if n not in dataset.column_names]
    if missing:
        raise MissingColumn(f"columns not found: {missing}")
    idx = [dataset.column_names.index(n) for n in names]
    return Dataset(dataset.name, dataset.x[:, idx], dataset.y, tuple(names), dataset.response_name)
