"""Data-analysis driver and the CSV layout shared by all SMSE tables.

A table file holds one block per ``(l, p)`` scenario::

    scenario,l=4,p=0
    estimator,0.1,0.2,...
    MRE,0.0126,...
    <blank line>
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .canonical import CanonicalForm, RestrictionSystem, SampleModel, build_canonical, plugin_model
from .datasets import Dataset
from .errors import DimensionMismatch, ParseError
from .estimators import ALL_KINDS, SmseTable, check_grid, smse_grid
from .estimators import template as spec_template
from .predictors import predictor_smse_grid

DATA_R = (1.0, -2.0, -2.0, -2.0)
DATA_G = 1.0
DATA_SCENARIOS = ((4, 0), (3, 1), (2, 2))


@dataclass(frozen=True)
class RestrictionTemplate:
    """Prior specification before truncation to the fitted columns.

    ``r=None`` means the plug-in ``R beta1_hat + g``.
    """

    R: np.ndarray
    g: np.ndarray
    W: Optional[np.ndarray] = None
    r: Optional[np.ndarray] = None

    @classmethod
    def data_default(cls) -> "RestrictionTemplate":
        return cls(R=np.array([DATA_R]), g=np.array([DATA_G]))

    def for_model(self, model: SampleModel) -> RestrictionSystem:
        R = np.atleast_2d(np.asarray(self.R, dtype=float))
        if R.shape[1] < model.l:
            raise DimensionMismatch(f"R has {R.shape[1]} columns, need at least l={model.l}")
        R = R[:, : model.l]
        q = R.shape[0]
        g = np.asarray(self.g, dtype=float).reshape(-1)[:q]
        if g.size != q:
            raise DimensionMismatch(f"g needs at least {q} entries")
        if self.r is None:
            r = R @ model.beta_included + g
        else:
            r = np.asarray(self.r, dtype=float).reshape(-1)[:q]
        return RestrictionSystem(R=R, r=r, g=g, W=self.W)


@dataclass(frozen=True)
class ScenarioResult:
    l: int
    p: int
    model: SampleModel
    canon: CanonicalForm
    estimators: SmseTable
    predictors: SmseTable


def analyze_dataset(dataset: Dataset, scenario: tuple, grid: Sequence[float],
                    template: Optional[RestrictionTemplate] = None, h: Optional[int] = None,
                    sigma2: Optional[float] = None) -> ScenarioResult:
    l, p = scenario
    grid = check_grid(grid)
    template = RestrictionTemplate.data_default() if template is None else template
    model = plugin_model(dataset.x, dataset.y, l, p, sigma2)
    canon = build_canonical(model, template.for_model(model))
    specs = [spec_template(kind, h) for kind in ALL_KINDS]
    est = smse_grid(specs, grid, canon)
    pred = predictor_smse_grid(specs, grid, canon, canon.delta)
    return ScenarioResult(l, p, model, canon, est, pred)


def _fmt(v: float) -> str:
    return f"{v:.10g}"


def tables_to_csv(blocks: Sequence[tuple]) -> str:
    """``blocks`` is a sequence of ``((l, p), SmseTable)``."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for idx, ((l, p), table) in enumerate(blocks):
        if idx:
            writer.writerow([])
        writer.writerow(["scenario", f"l={l}", f"p={p}"])
        writer.writerow(["estimator", *(f"{g:g}" for g in table.grid)])
        for name, row in zip(table.names, table.values):
            writer.writerow([name, *(_fmt(v) for v in row)])
    return buf.getvalue()


def read_tables_csv(text: str) -> list:
    """Inverse of :func:`tables_to_csv`."""
    blocks = []
    rows = list(csv.reader(io.StringIO(text)))
    idx = 0
    while idx < len(rows):
        row = rows[idx]
        if not row:
            idx += 1
            continue
        if row[0] != "scenario" or len(row) != 3:
            raise ParseError("expected scenario header", row=idx + 1)
        l, p = int(row[1].split("=")[1]), int(row[2].split("=")[1])
        grid = np.array([float(v) for v in rows[idx + 1][1:]])
        names, values = [], []
        idx += 2
        while idx < len(rows) and rows[idx]:
            names.append(rows[idx][0])
            values.append([float(v) for v in rows[idx][1:]])
            idx += 1
        blocks.append(((l, p), SmseTable(tuple(names), grid, np.array(values))))
    return blocks
