"""The eight stochastic restricted estimators as ``G @ gamma_MRE``.

Every estimator in canonical coordinates is a fixed matrix ``G`` applied to
the mixed regression estimate: a scalar multiple of the identity for the
ridge/Liu family, or a scalar multiple of the principal-component projector
``T_h T_h'`` for the PCR family.  Bias, dispersion and MSEM follow from
``G`` alone.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .canonical import CanonicalForm, RestrictionSystem, SampleModel
from .errors import DimensionMismatch, EmptyGrid, InvalidShrinkage


class Kind(str, enum.Enum):
    MRE = "MRE"
    SRRE = "SRRE"
    SRAURE = "SRAURE"
    SRLE = "SRLE"
    SRAULE = "SRAULE"
    SRPCR = "SRPCR"
    SRrk = "SRrk"
    SRrd = "SRrd"

    @property
    def uses_k(self) -> bool:
        return self in (Kind.SRRE, Kind.SRAURE, Kind.SRrk)

    @property
    def uses_d(self) -> bool:
        return self in (Kind.SRLE, Kind.SRAULE, Kind.SRrd)

    @property
    def uses_h(self) -> bool:
        return self in (Kind.SRPCR, Kind.SRrk, Kind.SRrd)


ALL_KINDS = tuple(Kind)


def parse_kind(name) -> Kind:
    if isinstance(name, Kind):
        return name
    for kind in Kind:
        if kind.value.lower() == str(name).lower():
            return kind
    raise InvalidShrinkage(f"unknown estimator kind {name!r}")


@dataclass(frozen=True)
class EstimatorSpec:
    """Estimator kind plus shrinkage parameters.

    ``k`` feeds the ridge kinds, ``d`` the Liu kinds and ``h`` (number of
    retained principal components) the PCR kinds.  Parameters that do not
    apply are ignored but still range-checked.  ``h=None`` means ``l - 1``
    (at least 1) once the model dimension is known.
    """

    kind: Kind
    k: Optional[float] = None
    d: Optional[float] = None
    h: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", parse_kind(self.kind))
        if self.k is not None and not (np.isfinite(self.k) and self.k > 0):
            raise InvalidShrinkage(f"k must be > 0, got {self.k}")
        if self.d is not None and not (0 < self.d < 1):
            raise InvalidShrinkage(f"d must lie in (0, 1), got {self.d}")
        if self.h is not None and (int(self.h) != self.h or self.h < 1):
            raise InvalidShrinkage(f"h must be a positive integer, got {self.h}")
        if self.kind.uses_k and self.k is None:
            raise InvalidShrinkage(f"{self.kind.value} requires k")
        if self.kind.uses_d and self.d is None:
            raise InvalidShrinkage(f"{self.kind.value} requires d")

    @property
    def label(self) -> str:
        parts = []
        if self.kind.uses_k:
            parts.append(f"k={self.k:g}")
        if self.kind.uses_d:
            parts.append(f"d={self.d:g}")
        if self.kind.uses_h and self.h is not None:
            parts.append(f"h={self.h}")
        return self.kind.value + (f"({', '.join(parts)})" if parts else "")

    def with_shrinkage(self, value: float) -> "EstimatorSpec":
        """Copy with the grid value placed in ``k`` or ``d`` as appropriate."""
        if self.kind.uses_k:
            return EstimatorSpec(self.kind, k=value, d=self.d, h=self.h)
        if self.kind.uses_d:
            return EstimatorSpec(self.kind, k=self.k, d=value, h=self.h)
        return self


def template(kind, h: Optional[int] = None) -> EstimatorSpec:
    """Spec with placeholder shrinkage, to be filled per grid point."""
    kind = parse_kind(kind)
    return EstimatorSpec(kind, k=0.5 if kind.uses_k else None, d=0.5 if kind.uses_d else None, h=h)


def c_k(k):
    return 1.0 / (1.0 + k)


def c_k_star(k):
    return (1.0 + 2.0 * k) / (1.0 + k) ** 2


def c_d(d):
    return 0.5 * (1.0 + d)


def c_d_star(d):
    return 0.25 * (1.0 + d) * (3.0 - d)


def scalar_factor(spec: EstimatorSpec) -> float:
    """The scalar multiplying ``I`` (or ``T_h T_h'`` for the PCR kinds)."""
    kind = spec.kind
    if kind in (Kind.MRE, Kind.SRPCR):
        return 1.0
    if kind in (Kind.SRRE, Kind.SRrk):
        return c_k(spec.k)
    if kind == Kind.SRAURE:
        return c_k_star(spec.k)
    if kind in (Kind.SRLE, Kind.SRrd):
        return c_d(spec.d)
    if kind == Kind.SRAULE:
        return c_d_star(spec.d)
    raise InvalidShrinkage(f"unhandled kind {kind}")


def resolve_h(spec: EstimatorSpec, l: int) -> int:
    h = max(l - 1, 1) if spec.h is None else int(spec.h)
    if h > l:
        raise InvalidShrinkage(f"h={h} exceeds l={l}")
    return h


def projector(canon: CanonicalForm, h: int) -> np.ndarray:
    """``T_h T_h'`` built from the leading ``h`` eigenvectors of ``X1'X1``."""
    th = canon.eigbasis[:, :h]
    return th @ th.T


def structure(spec: EstimatorSpec, canon: CanonicalForm):
    """Return ``(c, P)`` with ``G = c * P``; ``P`` is the identity for the
    non-PCR kinds."""
    c = scalar_factor(spec)
    if spec.kind.uses_h:
        return c, projector(canon, resolve_h(spec, canon.l))
    return c, np.eye(canon.l)


def factor_matrix(spec: EstimatorSpec, canon: CanonicalForm) -> np.ndarray:
    c, P = structure(spec, canon)
    return c * P


def estimate_mre(canon: CanonicalForm, model: SampleModel, restriction: RestrictionSystem) -> np.ndarray:
    if model.n != canon.n or restriction.R.shape[1] != canon.l:
        raise DimensionMismatch("canonical form does not match model/restriction")
    rhs = canon.x_star.T @ model.y + canon.r_star.T @ (canon.w_inv @ restriction.r)
    return canon.tau * rhs


def estimate(spec: EstimatorSpec, canon: CanonicalForm, model: SampleModel,
             restriction: RestrictionSystem) -> np.ndarray:
    g_mre = estimate_mre(canon, model, restriction)
    if spec.kind == Kind.MRE:
        return g_mre
    return factor_matrix(spec, canon) @ g_mre


def to_original(canon: CanonicalForm, gamma_hat) -> np.ndarray:
    """Map a canonical estimate back to the ``beta_1`` scale (``B @ gamma``)."""
    return canon.B @ np.asarray(gamma_hat)


@dataclass(frozen=True)
class EstimatorMoments:
    bias: np.ndarray
    dispersion: np.ndarray
    msem: np.ndarray

    @property
    def smse(self) -> float:
        return float(np.trace(self.msem))


def moments(spec: EstimatorSpec, canon: CanonicalForm) -> EstimatorMoments:
    """Generic moments of ``G gamma_MRE`` for any ``G``."""
    canon.require_truth()
    G = factor_matrix(spec, canon)
    eye = np.eye(canon.l)
    tau_a = canon.tau * canon.drift
    bias = (G - eye) @ canon.gamma + G @ tau_a
    disp = canon.sigma2 * (G * canon.tau) @ G.T
    disp = 0.5 * (disp + disp.T)
    return EstimatorMoments(bias=bias, dispersion=disp, msem=disp + np.outer(bias, bias))


def closed_form_moments(spec: EstimatorSpec, canon: CanonicalForm) -> EstimatorMoments:
    """Per-estimator closed forms, written out kind by kind.

    Independent of :func:`moments`; the two must agree.
    """
    canon.require_truth()
    s2 = canon.sigma2
    tau = np.diag(canon.tau)
    ta = canon.tau * canon.drift
    gam = canon.gamma
    eye = np.eye(canon.l)
    kind, k, d = spec.kind, spec.k, spec.d
    if kind.uses_h:
        P = projector(canon, resolve_h(spec, canon.l))
        ptp = P @ tau @ P.T
    if kind == Kind.MRE:
        bias, disp = ta, s2 * tau
    elif kind == Kind.SRRE:
        bias = (ta - k * gam) / (1 + k)
        disp = s2 * tau / (1 + k) ** 2
    elif kind == Kind.SRAURE:
        bias = ((1 + 2 * k) * ta - k**2 * gam) / (1 + k) ** 2
        disp = (1 + 2 * k) ** 2 * s2 * tau / (1 + k) ** 4
    elif kind == Kind.SRLE:
        bias = 0.5 * ((1 + d) * ta - (1 - d) * gam)
        disp = 0.25 * (1 + d) ** 2 * s2 * tau
    elif kind == Kind.SRAULE:
        bias = 0.25 * ((1 + d) * (3 - d) * ta - (1 - d) ** 2 * gam)
        disp = (1 + d) ** 2 * (3 - d) ** 2 * s2 * tau / 16
    elif kind == Kind.SRPCR:
        bias = (P - eye) @ gam + P @ ta
        disp = s2 * ptp
    elif kind == Kind.SRrk:
        bias = ((P - (1 + k) * eye) @ gam + P @ ta) / (1 + k)
        disp = s2 * ptp / (1 + k) ** 2
    elif kind == Kind.SRrd:
        bias = 0.5 * (1 + d) * ((P - 2 / (1 + d) * eye) @ gam + P @ ta)
        disp = 0.25 * (1 + d) ** 2 * s2 * ptp
    else:  # pragma: no cover
        raise InvalidShrinkage(kind)
    return EstimatorMoments(bias=bias, dispersion=disp, msem=disp + np.outer(bias, bias))


@dataclass(frozen=True)
class SmseTable:
    """Rows are estimators, columns are shrinkage grid points."""

    names: tuple
    grid: np.ndarray
    values: np.ndarray

    def row(self, name) -> np.ndarray:
        return self.values[self.names.index(parse_kind(name).value)]

    def argmin_names(self) -> list:
        return [self.names[i] for i in np.argmin(self.values, axis=0)]


def check_grid(grid: Iterable[float]) -> np.ndarray:
    grid = np.asarray(list(grid), dtype=float)
    if grid.size == 0:
        raise EmptyGrid("shrinkage grid is empty")
    if np.any(grid <= 0) or np.any(grid >= 1):
        raise InvalidShrinkage("grid values must lie strictly inside (0, 1)")
    return grid


def grid_factors(kind: Kind, grid: np.ndarray) -> np.ndarray:
    """Scalar factor of ``kind`` at every grid point (constant for MRE/SRPCR)."""
    if kind in (Kind.MRE, Kind.SRPCR):
        return np.ones_like(grid)
    if kind in (Kind.SRRE, Kind.SRrk):
        return c_k(grid)
    if kind == Kind.SRAURE:
        return c_k_star(grid)
    if kind in (Kind.SRLE, Kind.SRrd):
        return c_d(grid)
    return c_d_star(grid)


def _as_templates(kinds) -> list:
    out = []
    for item in kinds:
        out.append(item if isinstance(item, EstimatorSpec) else template(item))
    return out


def smse_curves(spec: EstimatorSpec, canon: CanonicalForm, grid: np.ndarray, delta=None):
    """Estimator SMSE (and predictor SMSE when ``delta`` is given) along the grid.

    With ``G = c P``: ``bias(c) = c u - gamma`` where ``u = P(gamma + tau A)``,
    ``tr D = c^2 sigma2 tr(P tau P')``.  Predictor SMSE adds the drift terms
    ``-2 b' X*' delta + delta'delta`` to ``tr(X* MSEM X*')``.
    """
    canon.require_truth()
    _, P = structure(spec, canon)
    c = grid_factors(spec.kind, grid)
    u = P @ (canon.gamma + canon.tau * canon.drift)
    gam = canon.gamma
    tr_disp = canon.sigma2 * np.sum(canon.tau * (P * P).sum(axis=0))
    bias = np.outer(c, u) - gam  # (grid, l)
    est = c**2 * tr_disp + np.einsum("gi,gi->g", bias, bias)
    if delta is None:
        return est, None
    xs = canon.x_star
    gram = xs.T @ xs
    ptp = (P * canon.tau) @ P.T
    tr_pred_disp = canon.sigma2 * np.sum(gram * ptp)
    xd = xs.T @ delta
    pred = (c**2 * tr_pred_disp
            + np.einsum("gi,ij,gj->g", bias, gram, bias)
            - 2.0 * bias @ xd
            + delta @ delta)
    return est, pred


def smse_grid(kinds: Sequence, grid: Iterable[float], canon: CanonicalForm) -> SmseTable:
    grid = check_grid(grid)
    specs = _as_templates(kinds)
    values = np.vstack([smse_curves(s, canon, grid)[0] for s in specs])
    return SmseTable(names=tuple(s.kind.value for s in specs), grid=grid, values=values)
