"""Closed-form dominance results for 28 ordered estimator pairs.

Each entry ``(i, j)`` names the estimator ``i`` that is compared against the
candidate ``j``.  For every pair we keep

* the precondition that makes ``D(i,j) = D(i) - D(j)`` positive definite,
  evaluated from scalar thresholds or from ``lambda* < 1``;
* the closed form of ``D(i,j)``, as a function of ``(k, d, P, tau)``
  with ``P = T_h T_h'``;
* the multiplier turning ``lambda_max(P tau P tau^{-1})`` into ``lambda*``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .canonical import CanonicalForm
from .errors import UnknownPair
from .estimators import EstimatorSpec, Kind, closed_form_moments, projector, resolve_h
from .matrix import DEFAULT_TOL, Tolerances, is_positive_definite, largest_relative_eigenvalue, pseudo_inverse

K = Kind


class Precondition(str, enum.Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    NOT_APPLICABLE = "NotApplicable"


class Rule(enum.Enum):
    UNCONDITIONAL = "unconditional"
    SCALAR = "scalar"
    LAMBDA = "lambda"
    PROJECTED = "projected"


@dataclass(frozen=True)
class Corollary:
    number: int
    i: Kind
    j: Kind
    rule: Rule
    # closed-form D(i,j) / sigma2 as f(k, d, P, tau_matrix)
    dispersion: Callable
    # scalar margin that must be > 0 (SCALAR and PROJECTED rules)
    margin: Optional[Callable] = None
    margin_text: str = ""
    # s_j / s_i for the LAMBDA rule
    multiplier: Optional[Callable] = None


def _ptp(P, T):
    return P @ T @ P.T


_TABLE = [
    Corollary(1, K.MRE, K.SRRE, Rule.UNCONDITIONAL,
              lambda k, d, P, T: k * (2 + k) * (1 + k) ** -2 * T),
    Corollary(2, K.MRE, K.SRAURE, Rule.UNCONDITIONAL,
              lambda k, d, P, T: k**2 * (k**2 + 4 * k + 2) * (1 + k) ** -4 * T),
    Corollary(3, K.MRE, K.SRLE, Rule.UNCONDITIONAL,
              lambda k, d, P, T: (3 + d) * (1 - d) / 4 * T),
    Corollary(4, K.MRE, K.SRAULE, Rule.UNCONDITIONAL,
              lambda k, d, P, T: (7 + 2 * d - d**2) * (1 - d) ** 2 / 16 * T),
    Corollary(5, K.MRE, K.SRPCR, Rule.LAMBDA,
              lambda k, d, P, T: T - _ptp(P, T),
              multiplier=lambda k, d: 1.0),
    Corollary(6, K.MRE, K.SRrk, Rule.LAMBDA,
              lambda k, d, P, T: T - (1 + k) ** -2 * _ptp(P, T),
              multiplier=lambda k, d: (1 + k) ** -2),
    Corollary(7, K.MRE, K.SRrd, Rule.LAMBDA,
              lambda k, d, P, T: T - (1 + d) ** 2 / 4 * _ptp(P, T),
              multiplier=lambda k, d: (1 + d) ** 2 / 4),
    Corollary(8, K.SRAURE, K.SRRE, Rule.UNCONDITIONAL,
              lambda k, d, P, T: k * (2 + 3 * k) * (1 + k) ** -4 * T),
    Corollary(9, K.SRLE, K.SRRE, Rule.SCALAR,
              lambda k, d, P, T: (k * (1 + d) + d + 3) * (k * (1 + d) + d - 1) / (4 * (1 + k) ** 2) * T,
              margin=lambda k, d: k - (1 - d) / (1 + d),
              margin_text="k > (1-d)/(1+d)"),
    Corollary(10, K.SRAULE, K.SRRE, Rule.SCALAR,
              lambda k, d, P, T: ((7 + 2 * d - d**2 + k * (1 + d) * (3 - d))
                                  * (k * (1 + d) * (3 - d) - (1 - d) ** 2)
                                  / (16 * (1 + k) ** 2) * T),
              margin=lambda k, d: k - (1 - d) ** 2 / ((1 + d) * (3 - d)),
              margin_text="k > (1-d)^2/((1+d)(3-d))"),
    Corollary(11, K.SRRE, K.SRPCR, Rule.LAMBDA,
              lambda k, d, P, T: (1 + k) ** -2 * T - _ptp(P, T),
              multiplier=lambda k, d: (1 + k) ** 2),
    Corollary(12, K.SRRE, K.SRrk, Rule.LAMBDA,
              lambda k, d, P, T: (T - _ptp(P, T)) * (1 + k) ** -2,
              multiplier=lambda k, d: 1.0),
    Corollary(13, K.SRRE, K.SRrd, Rule.LAMBDA,
              lambda k, d, P, T: (1 + k) ** -2 * T - (1 + d) ** 2 / 4 * _ptp(P, T),
              multiplier=lambda k, d: (1 + d) ** 2 * (1 + k) ** 2 / 4),
    Corollary(14, K.SRLE, K.SRAURE, Rule.SCALAR,
              lambda k, d, P, T: ((3 + 6 * k + k**2 + d * (1 + k) ** 2)
                                  * (k**2 - 2 * k - 1 + d * (1 + k) ** 2)
                                  / (4 * (1 + k) ** 4) * T),
              margin=lambda k, d: d - (1 + 2 * k - k**2) / (1 + k) ** 2,
              margin_text="d > (1+2k-k^2)/(1+k)^2"),
    Corollary(15, K.SRAULE, K.SRAURE, Rule.SCALAR,
              lambda k, d, P, T: (((1 + k) ** 2 * (1 + d) * (3 - d) + 4 * (1 + 2 * k))
                                  * ((1 + k) ** 2 * (1 + d) * (3 - d) - 4 * (1 + 2 * k))
                                  / (16 * (1 + k) ** 4) * T),
              margin=lambda k, d: (1 + d) * (3 - d) - 4 * (1 + 2 * k) / (1 + k) ** 2,
              margin_text="(1+d)(3-d) > 4(1+2k)/(1+k)^2"),
    Corollary(16, K.SRAURE, K.SRPCR, Rule.LAMBDA,
              lambda k, d, P, T: (1 + k) ** -4 * (1 + 2 * k) ** 2 * T - _ptp(P, T),
              multiplier=lambda k, d: (1 + k) ** 4 / (1 + 2 * k) ** 2),
    Corollary(17, K.SRAURE, K.SRrk, Rule.LAMBDA,
              lambda k, d, P, T: ((1 + 2 * k) ** 2 * T - (1 + k) ** 2 * _ptp(P, T)) * (1 + k) ** -4,
              multiplier=lambda k, d: (1 + k) ** 2 / (1 + 2 * k) ** 2),
    Corollary(18, K.SRAURE, K.SRrd, Rule.LAMBDA,
              lambda k, d, P, T: (1 + k) ** -4 * (1 + 2 * k) ** 2 * T - (1 + d) ** 2 / 4 * _ptp(P, T),
              multiplier=lambda k, d: (1 + d) ** 2 * (1 + k) ** 4 / (4 * (1 + 2 * k) ** 2)),
    Corollary(19, K.SRAULE, K.SRLE, Rule.UNCONDITIONAL,
              lambda k, d, P, T: (5 - d) * (1 - d) * (1 + d) ** 2 / 16 * T),
    Corollary(20, K.SRLE, K.SRPCR, Rule.LAMBDA,
              lambda k, d, P, T: (1 + d) ** 2 / 4 * T - _ptp(P, T),
              multiplier=lambda k, d: 4 / (1 + d) ** 2),
    Corollary(21, K.SRLE, K.SRrk, Rule.LAMBDA,
              lambda k, d, P, T: (1 + d) ** 2 / 4 * T - (1 + k) ** -2 * _ptp(P, T),
              multiplier=lambda k, d: 4 / ((1 + d) ** 2 * (1 + k) ** 2)),
    Corollary(22, K.SRLE, K.SRrd, Rule.LAMBDA,
              lambda k, d, P, T: (T - _ptp(P, T)) * (1 + d) ** 2 / 4,
              multiplier=lambda k, d: 1.0),
    Corollary(23, K.SRAULE, K.SRPCR, Rule.LAMBDA,
              lambda k, d, P, T: (1 + d) ** 2 * (3 - d) ** 2 / 16 * T - _ptp(P, T),
              multiplier=lambda k, d: 16 / ((1 + d) ** 2 * (3 - d) ** 2)),
    Corollary(24, K.SRAULE, K.SRrk, Rule.LAMBDA,
              lambda k, d, P, T: (1 + d) ** 2 * (3 - d) ** 2 / 16 * T - (1 + k) ** -2 * _ptp(P, T),
              multiplier=lambda k, d: 16 / ((1 + d) ** 2 * (3 - d) ** 2 * (1 + k) ** 2)),
    Corollary(25, K.SRAULE, K.SRrd, Rule.LAMBDA,
              lambda k, d, P, T: ((3 - d) ** 2 * T - 4 * _ptp(P, T)) * (1 + d) ** 2 / 16,
              multiplier=lambda k, d: 4 / (3 - d) ** 2),
    Corollary(26, K.SRPCR, K.SRrk, Rule.PROJECTED,
              lambda k, d, P, T: k * (2 + k) * (1 + k) ** -2 * _ptp(P, T),
              margin=lambda k, d: k,
              margin_text="k > 0 and P tau P PD"),
    Corollary(27, K.SRPCR, K.SRrd, Rule.PROJECTED,
              lambda k, d, P, T: (3 + d) * (1 - d) / 4 * _ptp(P, T),
              margin=lambda k, d: 1 - d,
              margin_text="d < 1 and P tau P PD"),
    Corollary(28, K.SRrd, K.SRrk, Rule.PROJECTED,
              lambda k, d, P, T: ((k * (1 + d) + d + 3) * (k * (1 + d) + d - 1)
                                  / (4 * (1 + k) ** 2) * _ptp(P, T)),
              margin=lambda k, d: k * (1 + d) + d - 1,
              margin_text="k(1+d)+d-1 > 0 and P tau P PD"),
]

COROLLARIES = {c.number: c for c in _TABLE}
_BY_PAIR = {(c.i, c.j): c for c in _TABLE}


def find_corollary(i_kind, j_kind) -> tuple[Optional[Corollary], bool]:
    """Return ``(corollary, reversed)`` for an ordered kind pair.

    ``reversed`` is True when only ``(j, i)`` has a closed form.  Raises
    :class:`UnknownPair` for a kind paired with itself.
    """
    i_kind, j_kind = Kind(i_kind), Kind(j_kind)
    if (i_kind, j_kind) in _BY_PAIR:
        return _BY_PAIR[(i_kind, j_kind)], False
    if (j_kind, i_kind) in _BY_PAIR:
        return _BY_PAIR[(j_kind, i_kind)], True
    raise UnknownPair(f"no corollary covers ({i_kind.value}, {j_kind.value})")


@dataclass(frozen=True)
class PreconditionRecord:
    corollary: Optional[int]
    status: Precondition
    reason: str
    quantity: float = float("nan")
    boundary: bool = False


def _params(k, d):
    # placeholders keep the lambdas total when a parameter is unused
    return (0.5 if k is None else float(k)), (0.5 if d is None else float(d))


def closed_form_dispersion_difference(number: int, canon: CanonicalForm, k=None, d=None,
                                  h: Optional[int] = None) -> np.ndarray:
    """``D(i,j)`` from its closed form, including ``sigma2``."""
    cor = COROLLARIES[number]
    k, d = _params(k, d)
    P = projector(canon, resolve_h(EstimatorSpec(Kind.SRPCR, h=h), canon.l))
    T = np.diag(canon.tau)
    return canon.sigma2 * cor.dispersion(k, d, P, T)


def lambda_star(number: int, canon: CanonicalForm, k=None, d=None, h: Optional[int] = None,
                tol: Tolerances = DEFAULT_TOL) -> float:
    cor = COROLLARIES[number]
    if cor.rule is not Rule.LAMBDA:
        raise UnknownPair(f"corollary C{number} has no lambda* precondition")
    k, d = _params(k, d)
    P = projector(canon, resolve_h(EstimatorSpec(Kind.SRPCR, h=h), canon.l))
    ptp = _ptp(P, np.diag(canon.tau))
    return cor.multiplier(k, d) * largest_relative_eigenvalue(ptp, np.diag(canon.tau), tol)


def corollary_precondition(i_kind, j_kind, canon: CanonicalForm, k=None, d=None,
                           h: Optional[int] = None, tol: Tolerances = DEFAULT_TOL) -> PreconditionRecord:
    """Evaluate the closed-form precondition of the corollary covering ``(i, j)``.

    Reverse-direction pairs return ``NotApplicable``.  A strict inequality
    cannot be certified inside the ``tol.boundary`` band, so such cases
    report ``Fails`` with ``boundary=True``.
    """
    cor, rev = find_corollary(i_kind, j_kind)
    if rev:
        return PreconditionRecord(cor.number, Precondition.NOT_APPLICABLE,
                                  f"only the reverse pair is covered (C{cor.number})")
    kk, dd = _params(k, d)
    band = tol.boundary
    if cor.rule is Rule.UNCONDITIONAL:
        return PreconditionRecord(cor.number, Precondition.HOLDS, "D(i,j) PD unconditionally")
    if cor.rule is Rule.SCALAR:
        m = cor.margin(kk, dd)
        status = Precondition.HOLDS if m > band else Precondition.FAILS
        return PreconditionRecord(cor.number, status, cor.margin_text, m, abs(m) <= band)
    if cor.rule is Rule.LAMBDA:
        lam = lambda_star(cor.number, canon, k, d, h, tol)
        status = Precondition.HOLDS if lam < 1 - band else Precondition.FAILS
        return PreconditionRecord(cor.number, status, "lambda* < 1", lam, abs(lam - 1) <= band)
    m = cor.margin(kk, dd)
    P = projector(canon, resolve_h(EstimatorSpec(Kind.SRPCR, h=h), canon.l))
    projected_pd = is_positive_definite(_ptp(P, np.diag(canon.tau)), tol)
    status = Precondition.HOLDS if (m > band and projected_pd) else Precondition.FAILS
    reason = cor.margin_text + ("" if projected_pd else " (P tau P singular)")
    return PreconditionRecord(cor.number, status, reason, m, abs(m) <= band)


def corollary_condition_value(number: int, canon: CanonicalForm, k=None, d=None,
                              h: Optional[int] = None, tol: Tolerances = DEFAULT_TOL) -> float:
    """``b_j'(D(i,j) + b_i b_i')^{-1} b_j`` from the closed-form ``D(i,j)`` and the
    per-estimator closed-form biases."""
    cor = COROLLARIES[number]
    kk, dd = _params(k, d)

    def spec(kind):
        return EstimatorSpec(kind, k=kk if kind.uses_k else None,
                             d=dd if kind.uses_d else None, h=h)

    b_i = closed_form_moments(spec(cor.i), canon).bias
    b_j = closed_form_moments(spec(cor.j), canon).bias
    D = closed_form_dispersion_difference(number, canon, k, d, h)
    return float(b_j @ pseudo_inverse(D + np.outer(b_i, b_i), tol) @ b_j)
