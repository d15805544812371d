"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 ``reproduce``
outputs differ from the stored reference tables.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
import time
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .analysis import DATA_SCENARIOS, RestrictionTemplate, analyze_dataset, read_tables_csv, tables_to_csv
from .comparison import Level, compare, verdicts_to_csv, verdicts_to_json
from .datasets import builtin_rnd_dataset, load_csv, write_csv
from .errors import NumericalError, UnknownPair, ValidationError
from .estimators import ALL_KINDS, EstimatorSpec, Kind, parse_kind
from .simulation import DEFAULT_GRID, STUDY_RHOS, STUDY_SCENARIOS, SimConfig, run_monte_carlo
from .svg import line_chart

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_MISMATCH = 0, 2, 3, 4
DEFAULT_SEED = 20240101
EXPECTED_DIR = Path(__file__).with_name("expected")
REPRODUCE_RTOL = 1e-8


# ---------------------------------------------------------------- parsing

def parse_scenario(text: str) -> tuple:
    try:
        l, p = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"scenario must be 'l,p', got {text!r}") from None
    if l < 1 or p < 0:
        raise argparse.ArgumentTypeError("scenario needs l >= 1 and p >= 0")
    return (l, p)


def parse_grid(text: str) -> tuple:
    """``start:stop:step`` with ``stop`` included, or a comma list."""
    try:
        if ":" in text:
            start, stop, step = (float(v) for v in text.split(":"))
            if step <= 0:
                raise ValueError
            count = int(round((stop - start) / step)) + 1
            values = [round(start + i * step, 10) for i in range(max(count, 0))]
        else:
            values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from None
    return tuple(values)


def _read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read JSON file {path}: {exc}") from None


def _restriction_template(args) -> RestrictionTemplate:
    base = RestrictionTemplate.data_default()
    R, g, r, W = base.R, base.g, None, None
    if args.restriction:
        spec = _read_json(args.restriction)
        if "R" not in spec or "g" not in spec:
            raise ValidationError("restriction file needs 'R' and 'g'")
        R, g = np.atleast_2d(spec["R"]), np.atleast_1d(spec["g"])
        r = None if spec.get("r") is None else np.atleast_1d(spec["r"])
        W = None if spec.get("W") is None else np.atleast_2d(spec["W"])
    if args.w and args.w != "identity":
        W = np.atleast_2d(_read_json(args.w))
    return RestrictionTemplate(R=np.asarray(R, float), g=np.asarray(g, float), W=W,
                               r=None if r is None else np.asarray(r, float))


def _dataset(args):
    if args.data:
        if not args.response:
            raise ValidationError("--response is required with --data")
        return load_csv(args.data, args.response)
    return builtin_rnd_dataset()


# ---------------------------------------------------------------- output

def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _atomic_write(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


class Outputs:
    def __init__(self, root: Path):
        self.root = Path(root)
        self.files: list[Path] = []

    def write(self, name: str, text: str) -> Path:
        path = _atomic_write(self.root / name, text)
        self.files.append(path)
        return path

    def manifest(self, command: str, config: dict, seed: Optional[int], started: float,
                 extra: Optional[dict] = None) -> Path:
        blob = json.dumps(config, sort_keys=True, default=str).encode()
        data = {
            "command": command,
            "config": config,
            "config_hash": hashlib.sha256(blob).hexdigest(),
            "seed": seed,
            "tool_version": __version__,
            "outputs": [
                {"path": p.relative_to(self.root).as_posix(), "sha256": _sha256(p), "bytes": p.stat().st_size}
                for p in self.files
            ],
            "timing_seconds": round(time.perf_counter() - started, 3),
        }
        if extra:
            data.update(extra)
        return _atomic_write(self.root / "manifest.json", json.dumps(data, indent=2, sort_keys=True, default=str) + "\n")


def _config_of(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


def _svg_for(table, title: str, ylabel: str) -> str:
    return line_chart(table.grid, {n: table.values[i] for i, n in enumerate(table.names)},
                      title=title, xlabel="k / d", ylabel=ylabel)


# ---------------------------------------------------------------- commands

def run_analysis(dataset, scenarios, grid, template, h):
    return [analyze_dataset(dataset, sc, grid, template, h) for sc in scenarios]


def cmd_analyze(args) -> int:
    started = time.perf_counter()
    out = Outputs(args.out)
    results = run_analysis(_dataset(args), args.scenario or list(DATA_SCENARIOS), args.grid,
                           _restriction_template(args), args.h)
    out.write("estimators_smse.csv", tables_to_csv([((r.l, r.p), r.estimators) for r in results]))
    out.write("predictors_smse.csv", tables_to_csv([((r.l, r.p), r.predictors) for r in results]))
    out.manifest("analyze", _config_of(args), None, started)
    return EXIT_OK


def _parse_pairs(text: Optional[str]):
    if not text:
        return None
    pairs = []
    for item in text.split(","):
        parts = item.strip().split(":")
        if len(parts) != 2:
            raise UnknownPair(f"pair must be 'I:J', got {item!r}")
        try:
            pairs.append((parse_kind(parts[0]), parse_kind(parts[1])))
        except ValidationError:
            raise UnknownPair(f"unknown estimator in pair {item!r}") from None
    return pairs


def _spec(kind: Kind, k: float, d: float, h: Optional[int]) -> EstimatorSpec:
    return EstimatorSpec(kind, k=k if kind.uses_k else None, d=d if kind.uses_d else None,
                         h=h if kind.uses_h else None)


def cmd_compare(args) -> int:
    started = time.perf_counter()
    out = Outputs(args.out)
    (res,) = run_analysis(_dataset(args), [args.scenario or (4, 0)], DEFAULT_GRID,
                          _restriction_template(args), args.h)
    canon = res.canon
    pairs = _parse_pairs(args.pairs) or [(a, b) for a in ALL_KINDS for b in ALL_KINDS]
    levels = [Level.ESTIMATOR, Level.PREDICTOR] if args.level == "both" else [Level(args.level.capitalize())]
    verdicts = []
    for level in levels:
        for a, b in pairs:
            v = compare(_spec(a, args.k, args.d, args.h), _spec(b, args.k, args.d, args.h), canon, level,
                        canon.delta)
            if a == b:
                v = type(v)(**{**v.__dict__, "verdict": v.verdict.INCONCLUSIVE, "reason": "self pair",
                               "source": "diagonal"})
            verdicts.append(v)
    out.write("verdicts.csv", verdicts_to_csv(verdicts))
    out.write("verdicts.json", verdicts_to_json(verdicts))
    out.manifest("compare", _config_of(args), None, started)
    return EXIT_OK


def _sim_configs(args) -> list:
    base = {}
    rhos = args.rho or list(STUDY_RHOS)
    scenarios = args.scenario or list(STUDY_SCENARIOS)
    if getattr(args, "config", None):
        base = _read_json(args.config)
        rhos = base.pop("rhos", rhos)
        scenarios = [tuple(s) for s in base.pop("scenarios", scenarios)]
        if "rho" in base:
            rhos = [base.pop("rho")]
    for key in ("reps", "seed", "n", "h"):
        val = getattr(args, key, None)
        if val is not None:
            base[key] = val
    if getattr(args, "grid", None) is not None:
        base["grid"] = args.grid
    m = base.get("m", 5)
    configs = []
    for rho in rhos:
        for l, p in scenarios:
            if l + p != m:
                raise ValidationError(f"scenario ({l},{p}) does not split m={m} regressors")
            configs.append(SimConfig(**{**base, "l": l, "p": p, "rho": float(rho)}))
    return configs


def run_simulation(configs, out: Outputs, figure_scenario=(3, 2)):
    """Write per-rho estimator/predictor CSVs, figures and diagnostics."""
    by_rho: dict = {}
    for cfg in configs:
        by_rho.setdefault(cfg.rho, []).append((cfg, run_monte_carlo(cfg)))
    diag_lines = ["rho,l,p,reps,seed,resampled,mean_condition_number,"
                  + ",".join(f"vif{i + 1}" for i in range(configs[0].m))]
    summary = {}
    for rho, items in by_rho.items():
        tag = f"rho{rho:g}"
        out.write(f"sim_estimators_{tag}.csv",
                  tables_to_csv([((c.l, c.p), r.estimator_smse) for c, r in items]))
        out.write(f"sim_predictors_{tag}.csv",
                  tables_to_csv([((c.l, c.p), r.predictor_smse) for c, r in items]))
        fig = next(((c, r) for c, r in items if (c.l, c.p) == tuple(figure_scenario)), items[-1])
        c, r = fig
        out.write(f"fig_estimators_{tag}.svg",
                  _svg_for(r.estimator_smse, f"Estimator SMSE, (l,p)=({c.l},{c.p}), rho={rho:g}", "SMSE"))
        out.write(f"fig_predictors_{tag}.svg",
                  _svg_for(r.predictor_smse, f"Predictor SMSE, (l,p)=({c.l},{c.p}), rho={rho:g}", "SMSE"))
        for c, r in items:
            diag_lines.append(",".join([f"{rho:g}", str(c.l), str(c.p), str(c.reps), str(c.seed), str(r.resampled),
                                        f"{r.mean_condition_number:.10g}",
                                        *(f"{v:.10g}" for v in r.mean_vif)]))
            summary[(rho, c.l, c.p)] = r
    out.write("sim_diagnostics.csv", "\n".join(diag_lines) + "\n")
    return summary


def cmd_simulate(args) -> int:
    started = time.perf_counter()
    out = Outputs(args.out)
    configs = _sim_configs(args)
    results = run_simulation(configs, out, args.figure_scenario)
    resampled = sum(r.resampled for r in results.values())
    out.manifest("simulate", _config_of(args), configs[0].seed, started,
                 {"resampled_replicates": resampled,
                  "config_digests": [c.digest() for c in configs]})
    return EXIT_OK


def cmd_dump_data(args) -> int:
    ds = builtin_rnd_dataset()
    target = Path(args.out)
    if target.suffix.lower() != ".csv":
        target = target / f"{ds.name}.csv"
    target.parent.mkdir(parents=True, exist_ok=True)
    write_csv(ds, target)
    print(target)
    return EXIT_OK


def _argmin_pattern(table, lo_name, hi_name, split=0.5, skip_adjacent=False):
    names = table.argmin_names()
    ok = []
    for g, name in zip(table.grid, names):
        if skip_adjacent and abs(abs(g - split) - 0.1) < 1e-9:
            continue
        ok.append(name == (lo_name if g < split else hi_name))
    return all(ok), names


def ordinal_findings(data_results, sim_results) -> dict:
    """Orderings reported for the published tables, checked on our output."""
    out = {}
    by_scenario = {(r.l, r.p): r for r in data_results}
    if (4, 0) in by_scenario:
        names = by_scenario[(4, 0)].estimators.argmin_names()
        out["data_(4,0)_MRE_best_estimator"] = {"pass": all(n == "MRE" for n in names), "argmin": names}
    if (2, 2) in by_scenario:
        ok, names = _argmin_pattern(by_scenario[(2, 2)].estimators, "SRLE", "SRRE")
        out["data_(2,2)_SRLE_then_SRRE_estimator"] = {"pass": ok, "argmin": names}
    key_a = (0.9, 3, 2)
    if key_a in sim_results:
        ok, names = _argmin_pattern(sim_results[key_a].estimator_smse, "SRLE", "SRRE")
        out["sim_rho0.9_(3,2)_SRLE_then_SRRE_estimator"] = {"pass": ok, "argmin": names}
    key_b = (0.999, 5, 0)
    if key_b in sim_results:
        names = sim_results[key_b].estimator_smse.argmin_names()
        out["sim_rho0.999_(5,0)_MRE_best_estimator"] = {"pass": all(n == "MRE" for n in names), "argmin": names}
    for (rho, l, p), res in sorted(sim_results.items()):
        ok, names = _argmin_pattern(res.predictor_smse, "SRrd", "SRrk", skip_adjacent=True)
        out[f"sim_rho{rho:g}_({l},{p})_SRrd_then_SRrk_predictor"] = {"pass": ok, "argmin": names}
    return out


def _compare_expected(out: Outputs) -> dict:
    report = {}
    for path in out.files:
        ref = EXPECTED_DIR / path.name
        if path.suffix != ".csv" or not ref.exists() or not path.name.startswith(("sim_est", "sim_pred", "data_")):
            continue
        got = read_tables_csv(path.read_text(encoding="utf-8"))
        want = read_tables_csv(ref.read_text(encoding="utf-8"))
        same = len(got) == len(want) and all(
            gs == ws and gt.names == wt.names and np.allclose(gt.values, wt.values, rtol=REPRODUCE_RTOL, atol=0)
            for (gs, gt), (ws, wt) in zip(got, want)
        )
        report[path.name] = same
    return report


def cmd_reproduce(args) -> int:
    started = time.perf_counter()
    out = Outputs(args.out)
    data = run_analysis(builtin_rnd_dataset(), list(DATA_SCENARIOS), DEFAULT_GRID, None, None)
    out.write("data_estimators_smse.csv", tables_to_csv([((r.l, r.p), r.estimators) for r in data]))
    out.write("data_predictors_smse.csv", tables_to_csv([((r.l, r.p), r.predictors) for r in data]))
    sim_args = argparse.Namespace(rho=None, scenario=None, reps=args.reps, seed=args.seed, n=None, h=None,
                                  grid=None, config=None)
    sim = run_simulation(_sim_configs(sim_args), out)
    findings = ordinal_findings(data, sim)
    checked = args.reps == 2000 and args.seed == DEFAULT_SEED
    regression = _compare_expected(out) if checked else {}
    report = {"ordinal_findings": findings, "reference_tables": regression,
              "reference_checked": checked}
    out.write("findings.json", json.dumps(report, indent=2, sort_keys=True) + "\n")
    out.manifest("reproduce", _config_of(args), args.seed, started)
    for name, item in findings.items():
        print(f"{'PASS' if item['pass'] else 'FAIL'} {name}")
    if checked and not all(regression.values()):
        print("reference tables differ: " + ", ".join(k for k, v in regression.items() if not v), file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


# ---------------------------------------------------------------- entry

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="srbe", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def data_opts(p):
        p.add_argument("--data", help="CSV file with a header row (default: built-in R&D data)")
        p.add_argument("--response", help="response column name in --data")
        p.add_argument("--restriction", help="JSON file with R, g and optional r, W")
        p.add_argument("--w", default="identity", help="'identity' or a JSON file holding W")
        p.add_argument("--h", type=int, help="retained principal components (default l-1)")
        p.add_argument("--out", default="out", help="output directory")

    p = sub.add_parser("analyze", help="SMSE tables for a data set")
    data_opts(p)
    p.add_argument("--scenario", type=parse_scenario, action="append", help="l,p (repeatable)")
    p.add_argument("--grid", type=parse_grid, default=DEFAULT_GRID, help="start:stop:step")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("compare", help="MSEM superiority verdicts")
    data_opts(p)
    p.add_argument("--scenario", type=parse_scenario, help="l,p (default 4,0)")
    p.add_argument("--k", type=float, default=0.5)
    p.add_argument("--d", type=float, default=0.5)
    p.add_argument("--pairs", help="comma list of I:J (default: all ordered pairs)")
    p.add_argument("--level", choices=("estimator", "predictor", "both"), default="both")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("simulate", help="Monte Carlo study")
    p.add_argument("--config", help="JSON file of simulation settings")
    p.add_argument("--rho", type=float, action="append")
    p.add_argument("--scenario", type=parse_scenario, action="append")
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--h", type=int)
    p.add_argument("--grid", type=parse_grid)
    p.add_argument("--figure-scenario", type=parse_scenario, default=(3, 2))
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("dump-data", help="write the built-in data set as CSV")
    p.add_argument("--out", default=".", help="directory or .csv path")
    p.set_defaults(func=cmd_dump_data)

    p = sub.add_parser("reproduce", help="data analysis plus the full simulation study")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--reps", type=int, default=2000)
    p.add_argument("--out", default="reproduce_out")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
