"""Small dense linear-algebra helpers used by the comparison machinery.

All definiteness and range decisions go through the tolerances in
:class:`Tolerances` so that floating point slack is declared in one place.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import AsymmetricInput, NotPositiveDefinite


@dataclass(frozen=True)
class Tolerances:
    """Slack constants for exact-arithmetic matrix statements.

    Attributes
    ----------
    symmetry : float
        Maximum relative asymmetry ``max|M - M'| / max(max|M|, 1)`` accepted.
    definite : float
        Relative eigenvalue margin for PD / NND decisions.
    pinv_cutoff : float
        Singular values below ``pinv_cutoff * s_max`` are treated as zero.
    membership : float
        Relative residual allowed for column-space membership.
    boundary : float
        Quadratic-form values within this distance of 1 are flagged boundary.
    crosscheck : float
        Relative slack on the eigenvalue oracle for MSEM differences.
    """

    symmetry: float = 1e-8
    definite: float = 1e-10
    pinv_cutoff: float = 1e-10
    membership: float = 1e-8
    boundary: float = 1e-9
    crosscheck: float = 1e-8


DEFAULT_TOL = Tolerances()


def check_symmetric(m, tol: Tolerances = DEFAULT_TOL, name: str = "matrix") -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise AsymmetricInput(f"{name} must be square, got shape {m.shape}")
    scale = max(np.max(np.abs(m)) if m.size else 0.0, 1.0)
    if np.max(np.abs(m - m.T), initial=0.0) > tol.symmetry * scale:
        raise AsymmetricInput(f"{name} is not symmetric")
    return 0.5 * (m + m.T)


def sym_eigvalsh(m) -> np.ndarray:
    """Eigenvalues of the symmetric part of ``m``, ascending."""
    m = np.asarray(m, dtype=float)
    return linalg.eigvalsh(0.5 * (m + m.T))


def _eig_scale(w: np.ndarray) -> float:
    return max(np.max(np.abs(w), initial=0.0), 1.0)


def is_positive_definite(m, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True when the smallest eigenvalue exceeds ``tol.definite`` times the
    larger of the spectral radius and one."""
    w = linalg.eigvalsh(check_symmetric(m, tol))
    return bool(w[0] > tol.definite * _eig_scale(w))


def is_nnd(m, tol: Tolerances = DEFAULT_TOL) -> bool:
    w = linalg.eigvalsh(check_symmetric(m, tol))
    return bool(w[0] >= -tol.definite * _eig_scale(w))


def largest_relative_eigenvalue(n_mat, m_mat, tol: Tolerances = DEFAULT_TOL) -> float:
    """Largest eigenvalue of ``N M^{-1}`` for ``M`` PD and ``N`` NND.

    Computed from the symmetric pencil ``N v = lambda M v`` so the result is
    real; ``M - N`` is PD exactly when the returned value is below one.
    """
    m_mat = check_symmetric(m_mat, tol, "M")
    n_mat = check_symmetric(n_mat, tol, "N")
    if not is_positive_definite(m_mat, tol):
        raise NotPositiveDefinite("M must be positive definite")
    w = linalg.eigh(n_mat, m_mat, eigvals_only=True)
    return float(w[-1])


def pseudo_inverse(a, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        return a.T.copy()
    u, s, vt = linalg.svd(a, full_matrices=False)
    keep = s > tol.pinv_cutoff * s[0] if s.size and s[0] > 0 else np.zeros_like(s, bool)
    inv_s = np.zeros_like(s)
    inv_s[keep] = 1.0 / s[keep]
    return (vt.T * inv_s) @ u.T


def column_space_residual(a, v, tol: Tolerances = DEFAULT_TOL) -> float:
    a = np.asarray(a, dtype=float)
    v = np.asarray(v, dtype=float)
    proj = a @ (pseudo_inverse(a, tol) @ v)
    return float(np.linalg.norm(v - proj))


def in_column_space(a, v, tol: Tolerances = DEFAULT_TOL) -> bool:
    v = np.asarray(v, dtype=float)
    return column_space_residual(a, v, tol) <= tol.membership * max(np.linalg.norm(v), 1.0)


def fix_signs(vectors: np.ndarray, eps: float = 1e-12) -> np.ndarray:
    """Flip columns so the first entry with magnitude above ``eps`` is positive."""
    out = np.array(vectors, dtype=float, copy=True)
    for j in range(out.shape[1]):
        col = out[:, j]
        idx = np.flatnonzero(np.abs(col) > eps)
        if idx.size and col[idx[0]] < 0:
            out[:, j] = -col
    return out


def descending_eigh(m) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric eigendecomposition with eigenvalues in descending order.

    Ties keep the solver's original relative order and eigenvector signs are
    normalised with :func:`fix_signs`, so output is deterministic.
    """
    w, v = linalg.eigh(0.5 * (m + m.T))
    order = np.argsort(-w, kind="stable")
    return w[order], fix_signs(v[:, order])
