"""Random problem generators shared by the test modules."""

import numpy as np

from srbe.canonical import RestrictionSystem, SampleModel, build_canonical
from srbe.estimators import ALL_KINDS, EstimatorSpec


def random_problem(rng, n=None, l=None, p=None, q=None, collinear=True):
    """Random model, restriction and canonical form with known truth."""
    l = int(rng.integers(2, 5)) if l is None else l
    p = int(rng.integers(0, 3)) if p is None else p
    n = int(rng.integers(l + p + 2, 13)) if n is None else n
    q = int(rng.integers(1, l + 1)) if q is None else q
    x = rng.standard_normal((n, l + p))
    if collinear:
        x = x + rng.uniform(0, 2) * rng.standard_normal((n, 1))
    beta = rng.standard_normal(l + p) * rng.uniform(0.2, 2)
    sigma2 = float(rng.uniform(0.2, 2.0))
    y = x @ beta + np.sqrt(sigma2) * rng.standard_normal(n)
    model = SampleModel(y=y, x_included=x[:, :l], x_omitted=x[:, l:], sigma2=sigma2,
                        beta_included=beta[:l], beta_omitted=beta[l:])
    R = rng.standard_normal((q, l))
    L = rng.standard_normal((q, q))
    W = L @ L.T + q * np.eye(q)
    g = rng.standard_normal(q) * rng.uniform(0, 1)
    r = R @ beta[:l] + g + rng.standard_normal(q)
    restriction = RestrictionSystem(R=R, r=r, g=g, W=W)
    return model, restriction, build_canonical(model, restriction)


def random_spec(rng, kind=None, l=None):
    kind = ALL_KINDS[int(rng.integers(len(ALL_KINDS)))] if kind is None else kind
    h = None
    if kind.uses_h and l is not None:
        h = int(rng.integers(1, l + 1))
    return EstimatorSpec(kind,
                         k=float(rng.uniform(0.01, 2)) if kind.uses_k else None,
                         d=float(rng.uniform(0.01, 0.99)) if kind.uses_d else None,
                         h=h)
