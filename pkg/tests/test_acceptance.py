"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the PASS/FAIL lines are
written straight to the terminal even when output capture is on.
"""

import dataclasses
import time

import numpy as np
import pytest

from helpers import random_problem, random_spec
from srbe.analysis import DATA_SCENARIOS, analyze_dataset
from srbe.canonical import design_diagnostics, ols_fit
from srbe.cli import main
from srbe.comparison import Verdict, compare_estimators, compare_predictors, predictor_difference_parts
from srbe.corollaries import COROLLARIES, Precondition, closed_form_dispersion_difference, corollary_precondition
from srbe.datasets import builtin_rnd_dataset
from srbe.estimators import ALL_KINDS, EstimatorSpec, Kind, estimate, moments
from srbe.matrix import is_positive_definite
from srbe.predictors import predictor_moments
from srbe.simulation import DEFAULT_GRID, calibrate_design, run_monte_carlo, study_configs

SEED = 20240101


@pytest.fixture
def report(capsys):
    def emit(number, passed, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if passed else 'FAIL'} criterion {number}: {detail}")
    return emit


@pytest.fixture(scope="module")
def study_runs():
    start = time.perf_counter()
    runs = {(c.rho, c.l, c.p): run_monte_carlo(c) for c in study_configs(reps=2000, seed=SEED)}
    return runs, time.perf_counter() - start


def _within(got, want, rel):
    return bool(np.all(np.abs(np.asarray(got) - want) <= rel * np.abs(want)))


# 1 ------------------------------------------------------------------------

def test_criterion_1_data_diagnostics(report):
    start = time.perf_counter()
    ds = builtin_rnd_dataset()
    ev, cond, vif = design_diagnostics(ds.x)
    beta, s2 = ols_fit(ds.x, ds.y)
    elapsed = time.perf_counter() - start
    checks = {
        "eigenvalues": _within(ev, np.array([302.96, 0.728, 0.044, 0.035]), 0.005),
        "condition": abs(cond - 93) <= 1,
        "vif": _within(vif, np.array([6.91, 21.58, 29.75, 1.79]), 0.02),
        "ols": bool(np.all(np.abs(beta - [0.645, 0.089, 0.143, 0.152]) <= 1e-3)),
        "sigma2": abs(s2 - 0.00153) <= 1e-5,
        "runtime": elapsed < 1.0,
    }
    passed = all(checks.values())
    report(1, passed, f"eig={np.round(ev, 3).tolist()} cond={cond:.2f} vif={np.round(vif, 2).tolist()} "
                      f"beta={np.round(beta, 4).tolist()} s2={s2:.6f} t={elapsed:.3f}s "
                      f"failed={[k for k, v in checks.items() if not v]}")
    assert passed, checks


# 2 ------------------------------------------------------------------------

def _collapse_gap(canon):
    base = moments(EstimatorSpec(Kind.MRE), canon).msem
    l = canon.l
    cases = [
        (EstimatorSpec(Kind.SRRE, k=1e-14), base),
        (EstimatorSpec(Kind.SRAURE, k=1e-14), base),
        (EstimatorSpec(Kind.SRLE, d=1 - 1e-14), base),
        (EstimatorSpec(Kind.SRAULE, d=1 - 1e-14), base),
        (EstimatorSpec(Kind.SRPCR, h=l), base),
        (EstimatorSpec(Kind.SRrk, k=0.3, h=l), moments(EstimatorSpec(Kind.SRRE, k=0.3), canon).msem),
        (EstimatorSpec(Kind.SRrd, d=0.3, h=l), moments(EstimatorSpec(Kind.SRLE, d=0.3), canon).msem),
        (EstimatorSpec(Kind.SRrk, k=1e-14, h=l), base),
        (EstimatorSpec(Kind.SRrd, d=1 - 1e-14, h=l), base),
    ]
    gaps = []
    for spec, target in cases:
        scale = max(1.0, np.abs(target).max())
        gaps.append(np.abs(moments(spec, canon).msem - target).max() / scale)
    return max(gaps)


def test_criterion_2_structural_properties(report, study_runs):
    runs, _ = study_runs
    tables = []
    for sc in DATA_SCENARIOS:
        res = analyze_dataset(builtin_rnd_dataset(), sc, DEFAULT_GRID)
        tables += [res.estimators, res.predictors]
    for res in runs.values():
        tables += [res.estimator_smse, res.predictor_smse]
    constant = all(np.all(t.row(name) == t.row(name)[0]) for t in tables for name in ("MRE", "SRPCR"))
    rng = np.random.default_rng(200)
    canons = [analyze_dataset(builtin_rnd_dataset(), sc, DEFAULT_GRID).canon for sc in DATA_SCENARIOS]
    canons += [random_problem(rng)[2] for _ in range(200)]
    worst = max(_collapse_gap(c) for c in canons)
    passed = constant and worst <= 1e-12
    report(2, passed, f"{len(tables)} tables constant MRE/SRPCR rows={constant}; "
                      f"max collapse gap {worst:.2e} over {len(canons)} problems")
    assert constant
    assert worst <= 1e-12


# 3 and 4 -------------------------------------------------------------------

def _literal_nnd(diff):
    w = np.linalg.eigvalsh(0.5 * (diff + diff.T))
    return w[0] >= -1e-8 * abs(np.trace(diff))


def test_criterion_3_estimator_iff(report):
    start = time.perf_counter()
    rng = np.random.default_rng(300)
    instances = held = violations = literal_violations = 0
    for _ in range(1500):
        l = int(rng.choice([2, 3, 4]))
        *_, canon = random_problem(rng, l=l)
        i, j = random_spec(rng, l=l), random_spec(rng, l=l)
        if i.kind == j.kind:
            continue
        instances += 1
        out = compare_estimators(i, j, canon)
        if out.precondition is not Precondition.HOLDS or out.boundary:
            continue
        held += 1
        superior = out.verdict is Verdict.J_SUPERIOR
        violations += superior != out.crosscheck_nnd()
        diff = moments(i, canon).msem - moments(j, canon).msem
        literal_violations += superior != _literal_nnd(diff)
    elapsed = time.perf_counter() - start
    passed = instances >= 1000 and violations == 0 and literal_violations == 0 and elapsed < 30
    report(3, passed, f"{instances} instances, {held} with D PD, violations={violations} "
                      f"(literal trace rule: {literal_violations}), t={elapsed:.1f}s")
    assert instances >= 1000 and violations == 0 and literal_violations == 0 and elapsed < 30


def test_criterion_4_predictor_iff(report):
    start = time.perf_counter()
    rng = np.random.default_rng(400)
    instances = held = violations = literal_violations = 0
    for _ in range(1500):
        l = int(rng.choice([2, 3, 4]))
        *_, canon = random_problem(rng, l=l)
        assert canon.n <= 12
        i, j = random_spec(rng, l=l), random_spec(rng, l=l)
        if i.kind == j.kind:
            continue
        instances += 1
        out = compare_predictors(i, j, canon, canon.delta)
        if out.precondition is not Precondition.HOLDS or out.boundary:
            continue
        held += 1
        superior = out.verdict is Verdict.J_SUPERIOR
        violations += superior != out.crosscheck_nnd()
        _, _, diff = predictor_difference_parts(i, j, canon, canon.delta)
        literal_violations += superior != _literal_nnd(diff)
    elapsed = time.perf_counter() - start
    passed = instances >= 1000 and violations == 0
    report(4, passed, f"{instances} instances, {held} with A NND, violations={violations} "
                      f"(literal trace rule: {literal_violations}), t={elapsed:.1f}s")
    assert instances >= 1000 and violations == 0


# 5 ------------------------------------------------------------------------

def test_criterion_5_corollary_suite(report):
    rng = np.random.default_rng(500)
    draws = 600
    disagreements = {n: 0 for n in COROLLARIES}
    boundary = 0
    worst_d = 0.0
    for _ in range(draws):
        *_, canon = random_problem(rng)
        k, d = float(rng.uniform(0.005, 3.0)), float(rng.uniform(0.005, 0.995))
        h = int(rng.integers(1, canon.l + 1))
        for number, cor in COROLLARIES.items():
            spec_i = EstimatorSpec(cor.i, k=k if cor.i.uses_k else None, d=d if cor.i.uses_d else None, h=h)
            spec_j = EstimatorSpec(cor.j, k=k if cor.j.uses_k else None, d=d if cor.j.uses_d else None, h=h)
            generic = moments(spec_i, canon).dispersion - moments(spec_j, canon).dispersion
            closed = closed_form_dispersion_difference(number, canon, k, d, h)
            worst_d = max(worst_d, np.abs(closed - generic).max() / max(1.0, np.abs(generic).max()))
            rec = corollary_precondition(cor.i, cor.j, canon, k, d, h)
            if rec.boundary:
                boundary += 1
                continue
            disagreements[number] += (rec.status is Precondition.HOLDS) != is_positive_definite(generic)
    total = sum(disagreements.values())
    passed = total == 0 and worst_d <= 1e-10
    report(5, passed, f"{draws} draws x 28 corollaries, disagreements={total}, boundary-band cases={boundary}, "
                      f"max |closed-form D - generic D| {worst_d:.2e}")
    assert total == 0, {n: c for n, c in disagreements.items() if c}
    assert worst_d <= 1e-10


# 6 ------------------------------------------------------------------------

def test_criterion_6_design_calibration(report):
    start = time.perf_counter()
    targets = {0.9: 9.49, 0.99: 34.77, 0.999: 115.66}
    got = {rho: calibrate_design(50, 5, rho, 2000, SEED) for rho in targets}
    elapsed = time.perf_counter() - start
    cond_ok = all(abs(got[r][0] - t) <= 0.1 * t for r, t in targets.items())
    vif_ok = _within(got[0.9][1], np.array([5.99, 5.88, 5.94, 5.96, 20.47]), 0.10)
    passed = cond_ok and vif_ok and elapsed < 120
    detail = ", ".join(f"rho={r}: cond {got[r][0]:.2f} (target {t})" for r, t in targets.items())
    report(6, passed, f"{detail}; vif(0.9)={np.round(got[0.9][1], 2).tolist()}; t={elapsed:.1f}s")
    assert cond_ok and vif_ok and elapsed < 120


# 7 ------------------------------------------------------------------------

def _pattern(table, lo, hi, skip_adjacent):
    names = table.argmin_names()
    ok = all(name == (lo if g < 0.5 else hi)
             for g, name in zip(table.grid, names)
             if not (skip_adjacent and abs(abs(g - 0.5) - 0.1) < 1e-9))
    return ok, names


def test_criterion_7_simulation_orderings(report, study_runs):
    runs, elapsed = study_runs
    ok_a, names_a = _pattern(runs[(0.9, 3, 2)].estimator_smse, "SRLE", "SRRE", skip_adjacent=False)
    names_b = runs[(0.999, 5, 0)].estimator_smse.argmin_names()
    ok_b = all(n == "MRE" for n in names_b)
    cells_c = {key: _pattern(res.predictor_smse, "SRrd", "SRrk", skip_adjacent=True)
               for key, res in sorted(runs.items())}
    ok_c = all(ok for ok, _ in cells_c.values())
    passed = ok_a and ok_b and ok_c and elapsed < 600
    lines = [f"(a) {'ok' if ok_a else 'no'} {names_a}", f"(b) {'ok' if ok_b else 'no'} {names_b}"]
    lines += [f"(c) rho={k[0]} (l,p)=({k[1]},{k[2]}) {'ok' if ok else 'no'} {names}"
              for k, (ok, names) in cells_c.items()]
    report(7, passed, f"t={elapsed:.1f}s\n    " + "\n    ".join(lines))
    assert ok_a, names_a
    assert ok_b, names_b
    assert ok_c, {k: v[1] for k, v in cells_c.items() if not v[0]}
    assert elapsed < 600


# 8 ------------------------------------------------------------------------

def _linear_operator(spec, canon, model, restr):
    """Matrices (Ly, Lr) with estimate = Ly y + Lr r, read off unit inputs."""
    n, q = model.n, restr.R.shape[0]
    zero_r, zero_y = np.zeros(q), np.zeros(n)

    def est(y, r):
        return estimate(spec, canon, dataclasses.replace(model, y=y), dataclasses.replace(restr, r=r))

    Ly = np.column_stack([est(e, zero_r) for e in np.eye(n)])
    Lr = np.column_stack([est(zero_y, e) for e in np.eye(q)])
    return Ly, Lr


def test_criterion_8_predictor_monte_carlo(report):
    rng = np.random.default_rng(800)
    draws = 100_000
    worst = 0.0
    failures = []
    for inst in range(5):
        model, restr, canon = random_problem(rng, p=int(rng.integers(1, 3)))
        s2 = model.sigma2
        n, q = model.n, restr.R.shape[0]
        eps = rng.standard_normal((draws, n)) * np.sqrt(s2)
        v = rng.standard_normal((draws, q)) @ np.linalg.cholesky(s2 * restr.W).T
        mean_y = model.x_included @ model.beta_included + canon.delta
        y = mean_y + eps
        r = restr.R @ model.beta_included + restr.g + v
        y0 = mean_y
        for kind in ALL_KINDS:
            spec = random_spec(rng, kind, canon.l)
            Ly, Lr = _linear_operator(spec, canon, model, restr)
            yhat = (y @ Ly.T + r @ Lr.T) @ canon.x_star.T
            empirical = float(np.mean(np.sum((yhat - y0) ** 2, axis=1)))
            analytic = predictor_moments(spec, canon, canon.delta).smse
            rel = abs(empirical - analytic) / analytic
            worst = max(worst, rel)
            if rel > 0.02:
                failures.append((inst, kind.value, analytic, empirical))
    passed = not failures
    report(8, passed, f"5 instances x 8 predictors x {draws} draws, max relative gap {worst:.4f}")
    assert passed, failures


# 9 ------------------------------------------------------------------------

def test_criterion_9_reproduce_is_deterministic(report, tmp_path, capsys):
    codes = []
    for name in ("first", "second"):
        codes.append(main(["reproduce", "--out", str(tmp_path / name)]))
    files = sorted(p.name for p in (tmp_path / "first").iterdir() if p.suffix in (".csv", ".svg"))
    same = all((tmp_path / "first" / f).read_bytes() == (tmp_path / "second" / f).read_bytes() for f in files)
    listed = files == sorted(p.name for p in (tmp_path / "second").iterdir() if p.suffix in (".csv", ".svg"))
    passed = same and listed and len(files) >= 10
    report(9, passed, f"{len(files)} CSV/SVG files byte-identical={same}; exit codes {codes}")
    assert passed
