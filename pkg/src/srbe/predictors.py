"""Predictors ``X* gamma_hat`` and their MSEM against ``y0 = X* gamma + delta``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .canonical import CanonicalForm, RestrictionSystem, SampleModel
from .errors import DimensionMismatch
from .estimators import (
    EstimatorSpec,
    SmseTable,
    _as_templates,
    check_grid,
    estimate,
    moments,
    smse_curves,
)


@dataclass(frozen=True)
class PredictorMoments:
    msem: np.ndarray

    @property
    def smse(self) -> float:
        return float(np.trace(self.msem))


def predict(spec: EstimatorSpec, canon: CanonicalForm, model: SampleModel,
            restriction: RestrictionSystem) -> np.ndarray:
    return canon.x_star @ estimate(spec, canon, model, restriction)


def _check_delta(canon: CanonicalForm, delta) -> np.ndarray:
    delta = np.asarray(delta, dtype=float)
    if delta.shape != (canon.n,):
        raise DimensionMismatch(f"delta must have length n={canon.n}, got shape {delta.shape}")
    return delta


def predictor_moments(spec: EstimatorSpec, canon: CanonicalForm, delta) -> PredictorMoments:
    """Full ``n x n`` MSEM of the predictor.

    ``X* M X*' - X* b delta' - delta b' X*' + delta delta'`` with ``M`` and
    ``b`` the estimator MSEM and bias.
    """
    delta = _check_delta(canon, delta)
    mom = moments(spec, canon)
    xs = canon.x_star
    xb = xs @ mom.bias
    msem = xs @ mom.msem @ xs.T - np.outer(xb, delta) - np.outer(delta, xb) + np.outer(delta, delta)
    return PredictorMoments(msem=0.5 * (msem + msem.T))


def predictor_smse(spec: EstimatorSpec, canon: CanonicalForm, delta) -> float:
    """Trace of the predictor MSEM using only ``l x l`` quantities."""
    delta = _check_delta(canon, delta)
    mom = moments(spec, canon)
    xs = canon.x_star
    gram = xs.T @ xs
    return float(np.sum(gram * mom.msem) - 2.0 * mom.bias @ (xs.T @ delta) + delta @ delta)


def predictor_smse_grid(kinds: Sequence, grid: Iterable[float], canon: CanonicalForm,
                        delta) -> SmseTable:
    grid = check_grid(grid)
    delta = _check_delta(canon, delta)
    specs = _as_templates(kinds)
    values = np.vstack([smse_curves(s, canon, grid, delta)[1] for s in specs])
    return SmseTable(names=tuple(s.kind.value for s in specs), grid=grid, values=values)
