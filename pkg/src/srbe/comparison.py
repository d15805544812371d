"""MSEM superiority tests between estimators and between predictors.

``compare_estimators`` decides whether estimator ``j`` beats ``i`` through the
rank-one criterion ``b_j'(D(i,j) + b_i b_i')^{-1} b_j <= 1`` (valid when
``D(i,j)`` is PD); ``compare_predictors`` does the same for predictors through
``theta' A^+ theta <= 1``.  Both also report the smallest eigenvalue of the
actual MSEM difference as an independent check.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import linalg

from .canonical import CanonicalForm
from .corollaries import Precondition, corollary_precondition, find_corollary
from .errors import UnknownPair, ValidationError
from .estimators import EstimatorSpec, moments, resolve_h
from .matrix import (
    DEFAULT_TOL,
    Tolerances,
    in_column_space,
    is_nnd,
    is_positive_definite,
    largest_relative_eigenvalue,
    pseudo_inverse,
)
from .predictors import _check_delta, predictor_smse

__all__ = [
    "ComparisonVerdict",
    "Level",
    "Precondition",
    "Verdict",
    "in_column_space",
    "is_nnd",
    "is_positive_definite",
    "largest_relative_eigenvalue",
    "pairwise_matrix",
    "pseudo_inverse",
    "compare_estimators",
    "compare_predictors",
    "verdicts_to_csv",
    "verdicts_to_json",
]


class Level(str, enum.Enum):
    ESTIMATOR = "Estimator"
    PREDICTOR = "Predictor"


class Verdict(str, enum.Enum):
    J_SUPERIOR = "JSuperior"
    NOT_SUPERIOR = "NotSuperior"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class ComparisonVerdict:
    i: str
    j: str
    level: Level
    precondition: Precondition
    reason: str
    condition_value: float
    verdict: Verdict
    crosscheck_min_eig: float
    crosscheck_scale: float
    boundary: bool = False
    in_range: Optional[bool] = None
    source: str = "generic"

    @property
    def pair(self) -> tuple:
        return (self.i, self.j)

    def crosscheck_nnd(self, tol: Tolerances = DEFAULT_TOL) -> bool:
        """Direct NND verdict on the MSEM difference."""
        return self.crosscheck_min_eig >= -tol.crosscheck * self.crosscheck_scale

    def as_row(self) -> dict:
        return {
            "i": self.i,
            "j": self.j,
            "level": self.level.value,
            "precondition": self.precondition.value,
            "reason": self.reason,
            "condition_value": self.condition_value,
            "verdict": self.verdict.value,
            "boundary": self.boundary,
            "in_range": self.in_range,
            "crosscheck_min_eig": self.crosscheck_min_eig,
            "source": self.source,
        }


def _spectrum(m: np.ndarray, magnitude: float) -> tuple[float, float]:
    """Smallest eigenvalue of ``m`` and the scale for its rounding slack.

    The scale is the larger of the nuclear norm of ``m`` and ``magnitude``
    (the summed SMSE of the two operands), so that cancellation between
    two nearly equal MSEMs is judged against their size.
    """
    w = linalg.eigvalsh(0.5 * (m + m.T))
    return float(w[0]), max(float(np.sum(np.abs(w))), magnitude)


def _decide(value: float, tol: Tolerances) -> tuple[Verdict, bool]:
    boundary = abs(value - 1.0) <= tol.boundary
    if value <= 1.0 or boundary:
        return Verdict.J_SUPERIOR, boundary
    return Verdict.NOT_SUPERIOR, False


def compare_estimators(i: EstimatorSpec, j: EstimatorSpec, canon: CanonicalForm,
                     tol: Tolerances = DEFAULT_TOL) -> ComparisonVerdict:
    """Estimator-level comparison: is ``j`` MSEM-superior to ``i``?"""
    mi, mj = moments(i, canon), moments(j, canon)
    D = mi.dispersion - mj.dispersion
    min_eig, scale = _spectrum(mi.msem - mj.msem, mi.smse + mj.smse)
    common = dict(i=i.label, j=j.label, level=Level.ESTIMATOR,
                  crosscheck_min_eig=min_eig, crosscheck_scale=scale)
    if not is_positive_definite(D, tol):
        return ComparisonVerdict(precondition=Precondition.FAILS, reason="D(i,j) not PD",
                                 condition_value=math.nan, verdict=Verdict.INCONCLUSIVE, **common)
    value = float(mj.bias @ pseudo_inverse(D + np.outer(mi.bias, mi.bias), tol) @ mj.bias)
    verdict, boundary = _decide(value, tol)
    return ComparisonVerdict(precondition=Precondition.HOLDS, reason="D(i,j) PD",
                             condition_value=value, verdict=verdict, boundary=boundary, **common)


def predictor_difference_parts(i: EstimatorSpec, j: EstimatorSpec, canon: CanonicalForm, delta):
    """``(A, theta, diff)`` with ``diff = MSEM(y_i) - MSEM(y_j) = A - theta theta'``."""
    delta = _check_delta(canon, delta)
    mi, mj = moments(i, canon), moments(j, canon)
    xs = canon.x_star
    e = mi.bias - mj.bias
    xe = xs @ e
    inner = xs @ (mi.msem - mj.msem) @ xs.T
    A = inner + np.outer(xe, xe) + np.outer(delta, delta)
    theta = delta + xe
    diff = inner - np.outer(xe, delta) - np.outer(delta, xe)
    return 0.5 * (A + A.T), theta, 0.5 * (diff + diff.T)


def compare_predictors(i: EstimatorSpec, j: EstimatorSpec, canon: CanonicalForm, delta,
                     tol: Tolerances = DEFAULT_TOL) -> ComparisonVerdict:
    """Predictor-level comparison: is ``X* gamma_j`` MSEM-superior to ``X* gamma_i``?"""
    A, theta, diff = predictor_difference_parts(i, j, canon, delta)
    magnitude = predictor_smse(i, canon, delta) + predictor_smse(j, canon, delta)
    min_eig, scale = _spectrum(diff, magnitude)
    common = dict(i=i.label, j=j.label, level=Level.PREDICTOR,
                  crosscheck_min_eig=min_eig, crosscheck_scale=scale)
    if not is_nnd(A, tol):
        return ComparisonVerdict(precondition=Precondition.FAILS, reason="A not NND",
                                 condition_value=math.nan, verdict=Verdict.INCONCLUSIVE, **common)
    member = bool(in_column_space(A, theta, tol))
    value = float(theta @ pseudo_inverse(A, tol) @ theta)
    if member:
        verdict, boundary = _decide(value, tol)
    else:
        verdict, boundary = Verdict.NOT_SUPERIOR, False
    return ComparisonVerdict(precondition=Precondition.HOLDS, reason="A NND",
                             condition_value=value, verdict=verdict, boundary=boundary,
                             in_range=member, **common)


def _shared_parameters(i: EstimatorSpec, j: EstimatorSpec, l: int):
    """``(k, d, h)`` if the two specs agree on every parameter both use, else None."""
    k = {s.k for s in (i, j) if s.kind.uses_k}
    d = {s.d for s in (i, j) if s.kind.uses_d}
    h = {resolve_h(s, l) for s in (i, j) if s.kind.uses_h}
    if len(k) > 1 or len(d) > 1 or len(h) > 1:
        return None
    return (next(iter(k), None), next(iter(d), None), next(iter(h), None))


def _label_source(i: EstimatorSpec, j: EstimatorSpec, canon: CanonicalForm, tol: Tolerances):
    """Corollary tag and precondition record for an estimator pair, if any."""
    if i.kind == j.kind:
        return "generic", None
    params = _shared_parameters(i, j, canon.l)
    if params is None:
        return "generic", None
    try:
        cor, rev = find_corollary(i.kind, j.kind)
    except UnknownPair:
        return "generic", None
    if rev:
        return "generic", None
    k, d, h = params
    return f"C{cor.number}", corollary_precondition(i.kind, j.kind, canon, k, d, h, tol)


def compare(i: EstimatorSpec, j: EstimatorSpec, canon: CanonicalForm, level: Level = Level.ESTIMATOR,
            delta=None, tol: Tolerances = DEFAULT_TOL) -> ComparisonVerdict:
    level = Level(level)
    if level is Level.PREDICTOR:
        if delta is None:
            delta = canon.delta
        if delta is None:
            raise ValidationError("predictor comparison needs delta")
        out = compare_predictors(i, j, canon, delta, tol)
    else:
        out = compare_estimators(i, j, canon, tol)
    source, record = _label_source(i, j, canon, tol)
    reason = out.reason
    if record is not None and level is Level.ESTIMATOR:
        reason = f"{reason}; {record.reason}"
    return ComparisonVerdict(**{**out.__dict__, "source": source, "reason": reason})


def pairwise_matrix(specs: Sequence[EstimatorSpec], canon: CanonicalForm, delta=None,
                    level: Level = Level.ESTIMATOR, tol: Tolerances = DEFAULT_TOL):
    """Verdict for every ordered pair ``(specs[a], specs[b])``; diagonal is Inconclusive."""
    specs = list(specs)
    if len(specs) < 2:
        raise ValidationError("pairwise_matrix needs at least two estimators")
    level = Level(level)
    grid = []
    for a, si in enumerate(specs):
        row = []
        for b, sj in enumerate(specs):
            cell = compare(si, sj, canon, level, delta, tol)
            if a == b:
                cell = ComparisonVerdict(**{**cell.__dict__, "verdict": Verdict.INCONCLUSIVE,
                                            "reason": "self pair", "source": "diagonal"})
            row.append(cell)
        grid.append(row)
    return grid


def _flatten(verdicts):
    for item in verdicts:
        if isinstance(item, ComparisonVerdict):
            yield item
        else:
            yield from _flatten(item)


CSV_FIELDS = ("i", "j", "level", "precondition", "reason", "condition_value", "verdict",
              "boundary", "in_range", "crosscheck_min_eig", "source")


def _fmt(value):
    if isinstance(value, float):
        return "nan" if math.isnan(value) else f"{value:.12g}"
    if value is None:
        return ""
    return str(value)


def verdicts_to_csv(verdicts) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for v in _flatten(verdicts):
        row = v.as_row()
        writer.writerow([_fmt(row[f]) for f in CSV_FIELDS])
    return buf.getvalue()


def verdicts_to_json(verdicts) -> str:
    rows = []
    for v in _flatten(verdicts):
        row = v.as_row()
        for key, val in row.items():
            if isinstance(val, float) and math.isnan(val):
                row[key] = None
        rows.append(row)
    return json.dumps(rows, indent=2, sort_keys=True) + "\n"
