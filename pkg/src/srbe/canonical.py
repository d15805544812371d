"""Canonical form of a misspecified regression with stochastic restrictions.

The true model is ``y = X1 b1 + X2 b2 + e`` while the analyst fits
``y = X1 b1 + u`` and also holds a noisy, possibly biased prior
``r = R b1 + g + v`` with ``D(v) = sigma2 * W``.  A single nonsingular
transform ``B`` diagonalises both ``X1'X1`` (to the identity) and
``R' (sigma2 W)^{-1} R`` (to ``diag(Lambda)``); every moment formula in the
package is evaluated in those coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import linalg

from .errors import (
    DimensionMismatch,
    IncompleteModel,
    NotPositiveDefinite,
    RankDeficientDesign,
    ValidationError,
)
from .matrix import check_symmetric, descending_eigh

RANK_RTOL = 1e-10


def _vector(x, name):
    a = np.asarray(x, dtype=float)
    if a.ndim == 0:
        a = a.reshape(1)
    if a.ndim != 1:
        raise DimensionMismatch(f"{name} must be a vector, got shape {a.shape}")
    return a


def _matrix(x, name, rows=None):
    a = np.asarray(x, dtype=float)
    if a.ndim == 1:
        a = a.reshape(-1, 1) if rows is not None and a.size == rows else a.reshape(1, -1)
    if a.ndim != 2:
        raise DimensionMismatch(f"{name} must be a matrix, got shape {a.shape}")
    return a


def check_full_rank(x: np.ndarray, name: str = "design") -> None:
    s = linalg.svdvals(x)
    if s.size == 0 or s[-1] < RANK_RTOL * s[0] or x.shape[0] < x.shape[1]:
        raise RankDeficientDesign(f"{name} is numerically rank deficient")


@dataclass(frozen=True)
class SampleModel:
    """Observed data plus (optionally) the true or plug-in coefficients.

    ``x_omitted`` may have zero columns. ``delta = x_omitted @ beta_omitted``
    is the drift the fitted model cannot see.
    """

    y: np.ndarray
    x_included: np.ndarray
    x_omitted: np.ndarray
    sigma2: float
    beta_included: Optional[np.ndarray] = None
    beta_omitted: Optional[np.ndarray] = None

    def __post_init__(self):
        y = _vector(self.y, "y")
        n = y.size
        x1 = _matrix(self.x_included, "x_included", rows=n)
        x2 = np.asarray(self.x_omitted, dtype=float)
        if x2.size == 0:
            x2 = np.zeros((n, 0))
        x2 = _matrix(x2, "x_omitted", rows=n) if x2.ndim != 2 else x2
        if x1.shape[0] != n or x2.shape[0] != n:
            raise DimensionMismatch("y, x_included and x_omitted must have the same number of rows")
        l, p = x1.shape[1], x2.shape[1]
        if l < 1 or n < l + p:
            raise DimensionMismatch(f"need n >= l + p >= 1, got n={n}, l={l}, p={p}")
        if not np.isfinite(self.sigma2) or self.sigma2 <= 0:
            raise ValidationError("sigma2 must be a positive finite scalar")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "x_included", x1)
        object.__setattr__(self, "x_omitted", x2)
        object.__setattr__(self, "sigma2", float(self.sigma2))
        if self.beta_included is not None:
            b1 = _vector(self.beta_included, "beta_included")
            if b1.size != l:
                raise DimensionMismatch("beta_included length must equal l")
            object.__setattr__(self, "beta_included", b1)
        if self.beta_omitted is not None:
            b2 = _vector(self.beta_omitted, "beta_omitted")
            if b2.size != p:
                raise DimensionMismatch("beta_omitted length must equal p")
            object.__setattr__(self, "beta_omitted", b2)

    @property
    def n(self) -> int:
        return self.y.size

    @property
    def l(self) -> int:
        return self.x_included.shape[1]

    @property
    def p(self) -> int:
        return self.x_omitted.shape[1]

    @property
    def delta(self) -> Optional[np.ndarray]:
        if self.p == 0:
            return np.zeros(self.n)
        if self.beta_omitted is None:
            return None
        return self.x_omitted @ self.beta_omitted


@dataclass(frozen=True)
class RestrictionSystem:
    """Stochastic prior ``r = R b1 + g + v`` with ``D(v) = sigma2 * W``."""

    R: np.ndarray
    r: np.ndarray
    g: np.ndarray
    W: Optional[np.ndarray] = None

    def __post_init__(self):
        R = _matrix(self.R, "R")
        q = R.shape[0]
        r = _vector(self.r, "r")
        g = _vector(self.g, "g")
        if r.size != q or g.size != q:
            raise DimensionMismatch(f"r and g must have length q={q}")
        W = np.eye(q) if self.W is None else np.asarray(self.W, dtype=float).reshape(q, q)
        W = check_symmetric(W, name="W")
        if linalg.eigvalsh(W)[0] <= 0:
            raise NotPositiveDefinite("W must be positive definite")
        if q > R.shape[1] or np.linalg.matrix_rank(R) != q:
            raise DimensionMismatch("R must have full row rank q <= l")
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "W", W)

    @property
    def q(self) -> int:
        return self.R.shape[0]

    def truncated(self, l: int) -> "RestrictionSystem":
        """Keep the first ``l`` columns of ``R`` for a reduced fitted model."""
        if l == self.R.shape[1]:
            return self
        if l > self.R.shape[1]:
            raise DimensionMismatch(f"cannot widen R from {self.R.shape[1]} to {l} columns")
        return RestrictionSystem(R=self.R[:, :l], r=self.r, g=self.g, W=self.W)


@dataclass(frozen=True)
class CanonicalForm:
    B: np.ndarray
    Lambda: np.ndarray
    x_star: np.ndarray
    r_star: np.ndarray
    tau: np.ndarray
    eigbasis: np.ndarray
    sigma2: float
    gamma: Optional[np.ndarray] = None
    drift: Optional[np.ndarray] = None
    delta: Optional[np.ndarray] = None
    w_inv: np.ndarray = field(default=None, repr=False)

    @property
    def l(self) -> int:
        return self.B.shape[0]

    @property
    def n(self) -> int:
        return self.x_star.shape[0]

    def require_truth(self) -> None:
        if self.gamma is None or self.drift is None:
            raise IncompleteModel(
                "moments need beta_included (and beta_omitted when p > 0)"
            )


def simultaneous_decompose(gram, prior_gram):
    """Find ``B`` with ``B' gram B = I`` and ``B' prior_gram B = diag(Lambda)``.

    Uses ``gram = L L'``; the eigenvectors ``Q`` of ``L^{-1} prior_gram L^{-T}``
    give ``B = L^{-T} Q``.

    Returns
    -------
    B : ndarray, shape (l, l)
    Lambda : ndarray, shape (l,)
        Nonnegative, descending.
    """
    gram = check_symmetric(gram, name="gram")
    prior_gram = check_symmetric(prior_gram, name="prior_gram")
    if gram.shape != prior_gram.shape:
        raise DimensionMismatch("gram and prior_gram must have the same shape")
    try:
        chol = linalg.cholesky(gram, lower=True)
    except linalg.LinAlgError as exc:
        raise NotPositiveDefinite("gram is not positive definite") from exc
    half = linalg.solve_triangular(chol, prior_gram, lower=True)
    inner = linalg.solve_triangular(chol, half.T, lower=True)
    lam, q = descending_eigh(inner)
    lam = np.where(lam < 0, 0.0, lam)
    b = linalg.solve_triangular(chol.T, q, lower=False)
    return b, lam


def build_canonical(model: SampleModel, restriction: RestrictionSystem) -> CanonicalForm:
    l = model.l
    if restriction.R.shape[1] != l:
        raise DimensionMismatch(f"R has {restriction.R.shape[1]} columns, model has l={l}")
    x1 = model.x_included
    check_full_rank(x1, "x_included")
    s2 = model.sigma2
    w_inv = linalg.inv(restriction.W)
    w_inv = 0.5 * (w_inv + w_inv.T)
    gram = x1.T @ x1
    prior_gram = restriction.R.T @ w_inv @ restriction.R / s2
    B, lam = simultaneous_decompose(gram, prior_gram)
    x_star = x1 @ B
    r_star = restriction.R @ B
    tau = 1.0 / (1.0 + s2 * lam)
    _, T = descending_eigh(gram)

    gamma = None
    if model.beta_included is not None:
        gamma = linalg.solve(B, model.beta_included)
    delta = model.delta
    drift = None
    if delta is not None:
        drift = x_star.T @ delta + r_star.T @ (w_inv @ restriction.g)
    return CanonicalForm(
        B=B,
        Lambda=lam,
        x_star=x_star,
        r_star=r_star,
        tau=tau,
        eigbasis=T,
        sigma2=s2,
        gamma=gamma,
        drift=drift,
        delta=delta,
        w_inv=w_inv,
    )


def design_diagnostics(x):
    """Eigenvalues of ``x'x`` (descending), ``sqrt(max/min)`` condition number
    and variance inflation factors from the inverse correlation matrix."""
    x = np.asarray(x, dtype=float)
    check_full_rank(x)
    ev = linalg.eigvalsh(x.T @ x)[::-1]
    cond = float(np.sqrt(ev[0] / ev[-1]))
    if x.shape[1] == 1:
        return ev, cond, np.ones(1)
    corr = np.corrcoef(x, rowvar=False)
    vif = np.diag(linalg.inv(corr))
    return ev, cond, vif


def ols_fit(x, y):
    """Least-squares coefficients and residual variance ``RSS / (n - m)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    check_full_rank(x)
    beta, *_ = linalg.lstsq(x, y)
    resid = y - x @ beta
    dof = x.shape[0] - x.shape[1]
    sigma2 = float(resid @ resid / dof) if dof > 0 else float("nan")
    return beta, sigma2


def plugin_model(x, y, l: int, p: int, sigma2: Optional[float] = None) -> SampleModel:
    """Data-analysis model: keep the first ``l`` columns, omit the next ``p``.

    Coefficients are taken from OLS on all ``l + p`` columns; ``sigma2``
    defaults to that fit's residual variance.
    """
    x = np.asarray(x, dtype=float)
    if l < 1 or p < 0 or l + p > x.shape[1]:
        raise DimensionMismatch(f"scenario (l={l}, p={p}) incompatible with {x.shape[1]} columns")
    full = x[:, : l + p]
    beta, s2_hat = ols_fit(full, y)
    return SampleModel(
        y=y,
        x_included=full[:, :l],
        x_omitted=full[:, l:],
        sigma2=s2_hat if sigma2 is None else sigma2,
        beta_included=beta[:l],
        beta_omitted=beta[l:],
    )
