import numpy as np
import pytest

from srbe.errors import ValidationError
from srbe.estimators import ALL_KINDS, moments, template
from srbe.simulation import (
    NormalStream,
    SimConfig,
    draw_replicate,
    generate_design,
    generate_response,
    study_configs,
    replicate_curves,
    replicate_stream,
    run_monte_carlo,
)


def test_stream_is_reproducible_and_keyed():
    a = NormalStream(7, 1, 0).normal(100)
    b = NormalStream(7, 1, 0).normal(100)
    c = NormalStream(7, 2, 0).normal(100)
    assert np.array_equal(a, b)
    assert not np.allclose(a, c)
    u = replicate_stream(7, 0).uniform(10000)
    assert u.min() > 0 and u.max() < 1


def test_normal_stream_moments():
    z = NormalStream(1).normal(200_000)
    assert abs(z.mean()) < 0.01
    assert abs(z.var() - 1) < 0.01
    assert abs(np.mean(z**4) - 3) < 0.05


def test_weak_correlation_gives_near_independent_columns():
    x = generate_design(5000, 4, 0.01, NormalStream(3))
    c = np.corrcoef(x, rowvar=False)
    assert np.max(np.abs(c - np.eye(4))) < 0.05


def test_shared_column_correlation():
    # the last column is (sqrt(1 - rho^2) + rho) z_m, so it correlates with the rest at rho
    rho = 0.6
    x = generate_design(40000, 4, rho, NormalStream(5))
    c = np.corrcoef(x, rowvar=False)
    expected = np.full((4, 4), rho**2)
    expected[:, 3] = expected[3, :] = rho
    np.fill_diagonal(expected, 1.0)
    assert np.allclose(c, expected, atol=0.02)


def test_pairwise_correlation_is_rho_squared():
    rho = 0.9
    x = generate_design(20000, 5, rho, NormalStream(4))
    c = np.corrcoef(x, rowvar=False)
    # columns sharing only z_m have correlation rho^2
    off = c[np.triu_indices(4, 1)]
    assert np.allclose(off, rho**2, atol=0.02)


def test_response_generation():
    resid = []
    for rep in range(2000):
        stream = replicate_stream(11, rep)
        x = generate_design(50, 5, 0.9, stream)
        y, beta = generate_response(x, stream)
        assert np.linalg.norm(beta) == pytest.approx(1.0)
        w, v = np.linalg.eigh(x.T @ x)
        assert abs(abs(beta @ v[:, -1]) - 1) < 1e-10
        resid.append(y - x @ beta)
    assert np.var(np.concatenate(resid)) == pytest.approx(1.0, rel=0.05)


def test_config_validation():
    with pytest.raises(ValidationError):
        SimConfig(l=3, p=1)
    with pytest.raises(ValidationError):
        SimConfig(rho=1.0)
    with pytest.raises(ValidationError):
        SimConfig(reps=0)
    with pytest.raises(ValidationError):
        SimConfig(grid=())
    cfg = SimConfig(l=3, p=2)
    assert cfg.restriction().R.shape == (1, 3)
    assert cfg.restriction().g.tolist() == [1.0]
    assert cfg.digest() == SimConfig(l=3, p=2).digest()
    assert cfg.digest() != SimConfig(l=3, p=2, seed=1).digest()


def test_study_configs_cover_nine_cells():
    cfgs = study_configs(reps=10)
    assert len(cfgs) == 9
    assert {(c.rho, c.l, c.p) for c in cfgs} == {(r, l, p) for r in (0.9, 0.99, 0.999)
                                                 for (l, p) in ((5, 0), (4, 1), (3, 2))}


def test_single_replicate_determinism():
    cfg = SimConfig(l=3, p=2, reps=1)
    a, b = run_monte_carlo(cfg), run_monte_carlo(cfg)
    assert np.array_equal(a.estimator_smse.values, b.estimator_smse.values)
    assert np.array_equal(a.predictor_smse.values, b.predictor_smse.values)
    for table in (a.estimator_smse, a.predictor_smse):
        assert np.all(table.row("MRE") == table.row("MRE")[0])
        assert np.all(table.row("SRPCR") == table.row("SRPCR")[0])


def test_replicate_curves_match_moments():
    cfg = SimConfig(l=4, p=1, reps=1)
    x, y, beta, _ = draw_replicate(cfg, 0)
    est, _, canon = replicate_curves(cfg, x, y, beta)
    for i, kind in enumerate(ALL_KINDS):
        for j, g in enumerate(cfg.grid):
            m = moments(template(kind).with_shrinkage(g), canon)
            assert est[i, j] == pytest.approx(m.smse, rel=1e-10)
            w = np.linalg.eigvalsh(m.msem)
            assert w[0] >= -1e-10 * m.smse


def test_unbiased_mre_smse_bound():
    """Correct model: MRE SMSE is at least sigma2 * (l - q) in every replicate."""
    cfg = SimConfig(l=5, p=0, reps=20, rho=0.99)
    res = run_monte_carlo(cfg)
    assert res.estimator_smse.row("MRE")[0] >= 4.0


def test_doubling_reps_is_stable():
    small = run_monte_carlo(SimConfig(l=3, p=2, reps=100))
    large = run_monte_carlo(SimConfig(l=3, p=2, reps=200))
    diff = np.abs(large.estimator_smse.values - small.estimator_smse.values)
    assert np.all(diff <= 3 * small.estimator_se + 1e-12)
    diff = np.abs(large.predictor_smse.values - small.predictor_smse.values)
    assert np.all(diff <= 3 * small.predictor_se + 1e-12)
