"""Monte Carlo study of estimator and predictor SMSE under collinear designs.

Regressors follow ``x_ij = sqrt(1 - rho^2) z_ij + rho z_im`` (the last column
of ``Z`` is the shared component), coefficients are the unit top eigenvector
of ``X'X`` and errors are standard normal.  Per replicate the SMSE is the
analytic trace of the MSEM at the true parameters; randomness enters only
through the design.

Random numbers: replicate ``r`` of a run seeded with ``seed`` draws from
``numpy.random.PCG64(SeedSequence([seed, r, attempt]))``.  Normals come from
inverting the standard normal CDF (``scipy.special.ndtri``) on uniforms
``(u + 0.5) / 2**53`` with ``u`` a 53-bit integer, so every replicate
consumes a fixed number of raw draws.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import special

from .canonical import (
    RestrictionSystem,
    SampleModel,
    build_canonical,
    check_full_rank,
    design_diagnostics,
)
from .errors import RankDeficientDesign, ValidationError
from .estimators import ALL_KINDS, SmseTable, check_grid, smse_curves, template
from .matrix import descending_eigh

DEFAULT_GRID = tuple(round(0.1 * i, 1) for i in range(1, 10))
STUDY_RHOS = (0.9, 0.99, 0.999)
STUDY_SCENARIOS = ((5, 0), (4, 1), (3, 2))
MAX_RESAMPLE_FRACTION = 0.01


class NormalStream:
    """Seedable standard-normal source using CDF inversion."""

    def __init__(self, seed: int, *keys: int):
        self.key = (int(seed),) + tuple(int(k) for k in keys)
        self._bits = np.random.Generator(np.random.PCG64(np.random.SeedSequence(list(self.key))))

    def uniform(self, size) -> np.ndarray:
        raw = self._bits.integers(0, 2**53, size=size, dtype=np.uint64)
        return (raw.astype(float) + 0.5) / 2.0**53

    def normal(self, size) -> np.ndarray:
        return special.ndtri(self.uniform(size))


def replicate_stream(seed: int, rep: int, attempt: int = 0) -> NormalStream:
    return NormalStream(seed, rep, attempt)


def generate_design(n: int, m: int, rho: float, stream: NormalStream) -> np.ndarray:
    z = stream.normal((n, m))
    return np.sqrt(1.0 - rho**2) * z + rho * z[:, [m - 1]]


def generate_response(x, stream: NormalStream):
    """Unit top eigenvector of ``x'x`` as ``beta``; ``y = x beta + N(0, 1)``."""
    x = np.asarray(x, dtype=float)
    check_full_rank(x)
    _, vecs = descending_eigh(x.T @ x)
    beta = vecs[:, 0] / np.linalg.norm(vecs[:, 0])
    y = x @ beta + stream.normal(x.shape[0])
    return y, beta


@dataclass(frozen=True)
class SimConfig:
    """One cell of the study: a fixed ``rho`` and kept/omitted split.

    ``g`` is the prior misspecification; with a single restriction row only
    its first entry is used.  ``h=None`` keeps ``l - 1`` components.
    """

    n: int = 50
    m: int = 5
    l: int = 5
    p: int = 0
    rho: float = 0.9
    reps: int = 2000
    seed: int = 20240101
    grid: tuple = DEFAULT_GRID
    R: tuple = ((1.0, 1.0, 1.0, 1.0, 1.0),)
    g: tuple = (1.0, -2.0, 0.0, 3.0, 1.0)
    W: Optional[tuple] = None
    sigma2: float = 1.0
    h: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(float(v) for v in self.grid))
        object.__setattr__(self, "R", tuple(tuple(float(v) for v in row) for row in np.atleast_2d(self.R)))
        object.__setattr__(self, "g", tuple(float(v) for v in np.atleast_1d(self.g)))
        if self.W is not None:
            object.__setattr__(self, "W", tuple(tuple(float(v) for v in row) for row in np.atleast_2d(self.W)))
        self.validate()

    def validate(self) -> None:
        if not (self.n > self.m >= self.l >= 1):
            raise ValidationError(f"need n > m >= l >= 1 (n={self.n}, m={self.m}, l={self.l})")
        if self.l + self.p != self.m:
            raise ValidationError(f"l + p must equal m ({self.l} + {self.p} != {self.m})")
        if not (0 < self.rho < 1):
            raise ValidationError("rho must lie in (0, 1)")
        if self.reps < 1:
            raise ValidationError("reps must be >= 1")
        if len(self.R[0]) != self.m:
            raise ValidationError("R must have m columns")
        check_grid(self.grid)

    def restriction(self) -> RestrictionSystem:
        """Restriction for the fitted model: ``R`` truncated to ``l`` columns
        and ``g`` cut to the number of rows (``r`` is unused by the moments)."""
        R = np.asarray(self.R)[:, : self.l]
        q = R.shape[0]
        g = np.asarray(self.g)[:q]
        W = None if self.W is None else np.asarray(self.W)
        return RestrictionSystem(R=R, r=np.zeros(q), g=g, W=W)

    def to_dict(self) -> dict:
        return asdict(self)

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class SimResult:
    config: SimConfig
    estimator_smse: SmseTable
    predictor_smse: SmseTable
    estimator_se: np.ndarray
    predictor_se: np.ndarray
    mean_condition_number: float
    mean_vif: np.ndarray
    resampled: int


def draw_replicate(config: SimConfig, rep: int, max_attempts: int = 50):
    """Design and response for replicate ``rep``; returns ``(x, y, beta, attempts)``."""
    for attempt in range(max_attempts):
        stream = replicate_stream(config.seed, rep, attempt)
        x = generate_design(config.n, config.m, config.rho, stream)
        try:
            y, beta = generate_response(x, stream)
        except RankDeficientDesign:
            continue
        return x, y, beta, attempt
    raise RankDeficientDesign(f"replicate {rep}: no full-rank design after {max_attempts} attempts")


def replicate_curves(config: SimConfig, x, y, beta, kinds=ALL_KINDS):
    """Estimator and predictor SMSE curves (rows = kinds) for one data set."""
    l = config.l
    model = SampleModel(
        y=y,
        x_included=x[:, :l],
        x_omitted=x[:, l:],
        sigma2=config.sigma2,
        beta_included=beta[:l],
        beta_omitted=beta[l:],
    )
    canon = build_canonical(model, config.restriction())
    grid = np.asarray(config.grid)
    est = np.empty((len(kinds), grid.size))
    pred = np.empty_like(est)
    for i, kind in enumerate(kinds):
        est[i], pred[i] = smse_curves(template(kind, config.h), canon, grid, canon.delta)
    return est, pred, canon


def run_monte_carlo(config: SimConfig, kinds: Sequence = ALL_KINDS) -> SimResult:
    kinds = tuple(kinds)
    grid = np.asarray(config.grid)
    shape = (len(kinds), grid.size)
    est_sum, est_sq = np.zeros(shape), np.zeros(shape)
    pred_sum, pred_sq = np.zeros(shape), np.zeros(shape)
    cond_sum, vif_sum = 0.0, np.zeros(config.m)
    resampled = 0
    for rep in range(config.reps):
        x, y, beta, attempts = draw_replicate(config, rep)
        resampled += attempts > 0
        est, pred, _ = replicate_curves(config, x, y, beta, kinds)
        est_sum += est
        est_sq += est**2
        pred_sum += pred
        pred_sq += pred**2
        _, cond, vif = design_diagnostics(x)
        cond_sum += cond
        vif_sum += vif
    if resampled > MAX_RESAMPLE_FRACTION * config.reps and resampled > 0:
        raise RankDeficientDesign(f"{resampled} of {config.reps} replicates needed resampling")
    n = config.reps
    names = tuple(k.value if hasattr(k, "value") else str(k) for k in kinds)

    def se(total, sq):
        if n < 2:
            return np.zeros(shape)
        var = np.maximum(sq / n - (total / n) ** 2, 0.0) * n / (n - 1)
        return np.sqrt(var / n)

    return SimResult(
        config=config,
        estimator_smse=SmseTable(names, grid, est_sum / n),
        predictor_smse=SmseTable(names, grid, pred_sum / n),
        estimator_se=se(est_sum, est_sq),
        predictor_se=se(pred_sum, pred_sq),
        mean_condition_number=cond_sum / n,
        mean_vif=vif_sum / n,
        resampled=int(resampled),
    )


def study_configs(reps: int = 2000, seed: int = 20240101, grid=DEFAULT_GRID,
                  rhos=STUDY_RHOS, scenarios=STUDY_SCENARIOS, **overrides):
    """The nine (rho, scenario) cells of the published study."""
    return [
        SimConfig(l=l, p=p, rho=rho, reps=reps, seed=seed, grid=tuple(grid), **overrides)
        for rho in rhos
        for (l, p) in scenarios
    ]


def calibrate_design(n: int, m: int, rho: float, reps: int, seed: int):
    """Mean condition number and VIF of the generated designs."""
    cfg = SimConfig(n=n, m=m, l=m, p=0, rho=rho, reps=reps, seed=seed, R=(tuple([1.0] * m),), g=(0.0,))
    conds, vifs = [], []
    for rep in range(reps):
        x, *_ = draw_replicate(cfg, rep)
        _, cond, vif = design_diagnostics(x)
        conds.append(cond)
        vifs.append(vif)
    return float(np.mean(conds)), np.mean(vifs, axis=0)
