"""Command-line entry point: ``python -m dirvar <command> ...``.

Commands
--------
simulate    model bundle and series from a JSON config
estimate    fit one estimator to a series, optionally scoring it against a truth bundle
preprocess  keep the most variable columns and center them
crossval    rolling cross-validation over a ``(p, lambda)`` grid
predict     one-step predictions from a model bundle
bench       seeded Monte-Carlo benchmark

Exit codes: 0 success, 2 bad configuration or input, 3 non-stationary
model, 4 estimation failure.  Every JSON file written carries a
``spec_version`` field.
"""

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .bench import BenchConfig, build_model, results_json, run_bench, table_csv
from .datagen import ModelMeta, PatternKind, SigmaSpec, read_model_bundle, write_model_bundle
from .errors import AllColumnsInfeasible, DirvarError, UnstableModel
from .estimators import estimate_direct, estimate_lasso, estimate_ridge, native_penalty
from .evaluation import SPEC_VERSION, cross_validate, default_grid, error_norms, predict_next
from .linalg import write_matrix_csv
from .lp import LpStatus
from .varproc import TimeSeries, read_series_csv, simulate, write_series_csv

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_UNSTABLE = 3
EXIT_ESTIMATION = 4


class CliError(Exception):
    def __init__(self, message, code=EXIT_INPUT):
        super().__init__(message)
        self.code = code


def _load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read JSON from {path}: {exc}") from exc


def _dump_json(path, payload):
    payload = dict(payload)
    payload["spec_version"] = SPEC_VERSION
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _read_series(path):
    try:
        return read_series_csv(path)
    except (OSError, ValueError) as exc:
        raise CliError(f"cannot read series {path}: {exc}") from exc


# simulate ------------------------------------------------------------------

def cmd_simulate(args):
    raw = _load_json(args.config)
    try:
        pattern = raw["pattern"]
        pattern = PatternKind(**pattern) if isinstance(pattern, dict) else PatternKind(pattern)
        sigma = raw.get("sigma", "diagonal")
        sigma = SigmaSpec(**sigma) if isinstance(sigma, dict) else SigmaSpec(sigma)
        d, t_len = int(raw["d"]), int(raw.get("t_len", raw.get("T")))
        p, kappa, seed = int(raw.get("p", 1)), float(raw["kappa"]), int(raw["seed"])
        noise = raw.get("noise", "derived" if p == 1 else "identity")
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"invalid simulate config: {exc}") from exc
    if noise == "derived" and p != 1:
        raise CliError("noise 'derived' needs p = 1")
    model = build_model(pattern, d, p, kappa, seed, sigma, noise)
    ts = simulate(model, t_len, seed)
    out = Path(args.out)
    meta = ModelMeta(d, p, kappa, pattern.tag.value, seed, {"t_len": t_len, "noise": noise, "spec_version": SPEC_VERSION})
    write_model_bundle(out, model, meta)
    series_path = out / "series.csv"
    write_series_csv(series_path, ts)
    for k in range(1, p + 1):
        print(out / f"A_{k}.csv")
    print(out / "psi.csv")
    print(out / "meta.json")
    print(series_path)
    return EXIT_OK


# estimate ------------------------------------------------------------------

def _grid_from_config(cv_cfg, ts, p_default):
    """Grid, windows and scale from a CV JSON object."""
    t_len = ts.t_len
    n1 = int(cv_cfg.get("n1", t_len // 2))
    n2 = int(cv_cfg.get("n2", t_len // 2))
    t0 = cv_cfg.get("t0")
    p_grid = [int(p) for p in cv_cfg.get("p_grid", [p_default])]
    if "grid" in cv_cfg:
        grid = [(int(g["p"]), float(g["lambda"])) for g in cv_cfg["grid"]]
        scale = cv_cfg.get("lambda_scale", "native")
    elif "lambda_grid" in cv_cfg:
        grid = [(p, float(lam)) for p in p_grid for lam in cv_cfg["lambda_grid"]]
        scale = cv_cfg.get("lambda_scale", "native")
    else:
        lo, hi, n = cv_cfg.get("lambda_range", (0.01, 2.0, 20))
        grid = default_grid(ts, p_grid, int(n), float(lo), float(hi))
        scale = cv_cfg.get("lambda_scale", "normalized")
    if not grid:
        raise CliError("empty cross-validation grid")
    if scale not in ("native", "normalized"):
        raise CliError(f"unknown lambda_scale {scale!r}")
    return grid, n1, n2, (None if t0 is None else int(t0)), scale


def fit_method(method, ts, p, lam):
    """Fit one estimator; returns ``(lags, per-column status strings)``."""
    if method == "direct":
        est = estimate_direct(ts, p, lam)
        return list(est.lags), [st.value for st in est.per_column_status]
    if method == "lasso":
        lags = estimate_lasso(ts, p, lam)
    elif method == "ridge":
        if lam <= 0:
            raise CliError("ridge needs a positive lambda")
        lags = estimate_ridge(ts, p, lam)
    else:
        raise CliError(f"unknown method {method!r}")
    return list(lags), [LpStatus.OPTIMAL.value] * ts.dim


def cmd_estimate(args):
    ts = _read_series(args.series)
    if args.lambda_ is not None and args.cv is not None:
        raise CliError("give either --lambda or --cv, not both")
    cv_report = None
    start = time.perf_counter()
    if args.lambda_ is not None:
        p, lam = args.p, float(args.lambda_)
        if lam < 0:
            raise CliError("lambda must be nonnegative")
    else:
        cv_cfg = _load_json(args.cv) if args.cv else {}
        grid, n1, n2, t0, scale = _grid_from_config(cv_cfg, ts, args.p)
        res = cross_validate(ts, grid, n1, n2, t0, args.method, normalized=scale == "normalized")
        p, lam = res.best
        if scale == "normalized":
            lam = native_penalty(args.method, lam, ts.t_len - p)
        cv_report = json.loads(res.to_json())
        cv_report["lambda_scale"] = scale
    lags, statuses = fit_method(args.method, ts, p, lam)
    elapsed = time.perf_counter() - start

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for k, a in enumerate(lags, start=1):
        write_matrix_csv(out / f"A_{k}.csv", a)
    # a meta.json makes the output directory a bundle that predict can load
    _dump_json(out / "meta.json", {"d": int(lags[0].shape[0]), "p": int(p), "method": args.method, "lambda": float(lam)})
    errors = None
    if args.truth:
        try:
            truth, _ = read_model_bundle(args.truth)
        except (OSError, ValueError, KeyError) as exc:
            raise CliError(f"cannot read truth bundle {args.truth}: {exc}") from exc
        t_lags = list(truth.transitions)
        width = max(len(t_lags), len(lags))
        zero = np.zeros_like(t_lags[0])
        errors = error_norms(lags + [zero] * (width - len(lags)), t_lags + [zero] * (width - len(t_lags))).as_dict()
    report = {
        "method": args.method,
        "p": int(p),
        "lambda": float(lam),
        "per_column_status": statuses,
        "infeasible_columns": [j for j, st in enumerate(statuses) if st != LpStatus.OPTIMAL.value],
        "wall_time": elapsed,
        "errors": errors,
        "cv": cv_report,
    }
    _dump_json(out / "report.json", report)
    print(out / "report.json")
    return EXIT_OK


# preprocess ----------------------------------------------------------------

def top_variance_columns(x, keep):
    """Indices of the ``keep`` columns with largest standard deviation, ties to the lower index."""
    sd = np.std(x, axis=0)
    order = sorted(range(x.shape[1]), key=lambda j: (-sd[j], j))
    return sorted(order[:keep])


def cmd_preprocess(args):
    path = Path(args.series)
    try:
        lines = [ln.strip() for ln in path.read_text().splitlines() if ln.strip()]
    except OSError as exc:
        raise CliError(f"cannot read series {path}: {exc}") from exc
    header = None
    if lines:
        first = lines[0].split(",")[0].strip()
        try:
            float(first)
        except ValueError:
            header = [tok.strip() for tok in lines[0].split(",")]
    x = _read_series(path).values
    if args.keep < 1 or args.keep > x.shape[1]:
        raise CliError(f"--keep {args.keep} must lie in [1, {x.shape[1]}]")
    kept = top_variance_columns(x, args.keep)
    reduced = x[:, kept]
    reduced = reduced - reduced.mean(axis=0)
    out = Path(args.out)
    write_series_csv(out, TimeSeries(reduced), [header[j] for j in kept] if header else None)
    manifest = out.with_name(out.stem + ".manifest.json")
    _dump_json(manifest, {"source": str(path), "kept_columns": kept, "n_columns_in": x.shape[1]})
    print(out)
    print(manifest)
    return EXIT_OK


# crossval ------------------------------------------------------------------

def cmd_crossval(args):
    ts = _read_series(args.series)
    cv_cfg = _load_json(args.grid)
    if isinstance(cv_cfg, list):
        cv_cfg = {"grid": cv_cfg}
    if args.t0 is not None:
        cv_cfg["t0"] = args.t0
    grid, _, _, t0, scale = _grid_from_config(cv_cfg, ts, 1)
    res = cross_validate(ts, grid, args.n1, args.n2, t0, args.method, normalized=scale == "normalized")
    payload = json.loads(res.to_json())
    payload["lambda_scale"] = scale
    _dump_json(args.out, payload)
    print(args.out)
    return EXIT_OK


# predict -------------------------------------------------------------------

def cmd_predict(args):
    try:
        model, _ = read_model_bundle(args.model)
    except (OSError, ValueError, KeyError) as exc:
        raise CliError(f"cannot read model bundle {args.model}: {exc}") from exc
    x = _read_series(args.series).values
    p = model.p
    if x.shape[1] != model.d:
        raise CliError(f"series has {x.shape[1]} columns, model has d={model.d}")
    if x.shape[0] < p:
        raise CliError(f"series needs at least p={p} rows")
    preds = np.array([predict_next(list(model.transitions), x[t - p:t]) for t in range(p, x.shape[0] + 1)])
    write_series_csv(args.out, TimeSeries(preds))
    print(args.out)
    return EXIT_OK


# bench ---------------------------------------------------------------------

def cmd_bench(args):
    cfg = BenchConfig.from_dict(_load_json(args.config))
    if args.replicates is not None:
        cfg = BenchConfig.from_dict(dict(cfg.to_dict(), replicates=args.replicates))
    rows, records = run_bench(cfg, workers=args.workers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "table.csv").write_text(table_csv(rows, cfg.record_timing))
    (out / "results.json").write_text(results_json(cfg, rows, records))
    print(out / "table.csv")
    print(out / "results.json")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="dirvar", description="Sparse VAR estimation by column-wise linear programs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a model bundle and a series")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="fit an estimator to a series")
    p.add_argument("--series", required=True)
    p.add_argument("--method", choices=("direct", "lasso", "ridge"), default="direct")
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--lambda", dest="lambda_", type=float)
    p.add_argument("--cv")
    p.add_argument("--truth")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("preprocess", help="keep the most variable columns and center them")
    p.add_argument("--series", required=True)
    p.add_argument("--keep", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("crossval", help="rolling cross-validation over a grid")
    p.add_argument("--series", required=True)
    p.add_argument("--grid", required=True)
    p.add_argument("--n1", type=int, required=True)
    p.add_argument("--n2", type=int, required=True)
    p.add_argument("--t0", type=int)
    p.add_argument("--method", choices=("direct", "lasso", "ridge"), default="direct")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_crossval)

    p = sub.add_parser("predict", help="one-step predictions from a model bundle")
    p.add_argument("--model", required=True)
    p.add_argument("--series", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("bench", help="seeded Monte-Carlo benchmark")
    p.add_argument("--config", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--replicates", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except UnstableModel as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except AllColumnsInfeasible as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ESTIMATION
    except (DirvarError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
