"""Seeded Monte-Carlo benchmark harness.

A :class:`BenchConfig` describes one experiment: the ground-truth generator
(pattern, dimension, length, lag order, covariance model, spectral norm),
the number of replicates and how each method is tuned.  Replicate ``r``
uses the seed ``seed ^ r`` for both the model and the series, so any single
replicate can be rerun on its own.  Replicates are independent work items;
results are gathered in replicate order, which makes the output files
independent of the worker count.
"""

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .datagen import (
    PatternKind,
    SigmaSpec,
    gen_pattern,
    make_var1_model,
    make_varp_model,
    rescale_spectral,
)
from .errors import AllColumnsInfeasible, BadParams, DirvarError
from .estimators import estimate_direct, estimate_lasso, estimate_ridge, native_penalty
from .evaluation import SPEC_VERSION, cross_validate, default_grid, error_norms
from .varproc import simulate

METHODS = ("direct", "lasso", "ridge")
NOISE_MODES = ("derived", "identity")


@dataclass(frozen=True)
class CvSpec:
    """Cross-validation settings; ``None`` windows default to ``T/2``."""

    n1: int = None
    n2: int = None
    p_grid: tuple = None
    lambda_grid: tuple = None
    lambda_range: tuple = (0.01, 2.0, 20)
    lambda_scale: str = "normalized"

    def __post_init__(self):
        if self.lambda_scale not in ("normalized", "native"):
            raise BadParams(f"lambda_scale must be 'normalized' or 'native', got {self.lambda_scale!r}")
        if self.lambda_grid is not None and len(self.lambda_grid) == 0:
            raise BadParams("lambda_grid must be non-empty")
        if self.p_grid is not None and len(self.p_grid) == 0:
            raise BadParams("p_grid must be non-empty")
        lo, hi, n = self.lambda_range
        if not (0 < lo <= hi) or int(n) < 1:
            raise BadParams(f"bad lambda_range {self.lambda_range}")


@dataclass(frozen=True)
class BenchConfig:
    pattern: PatternKind
    d: int
    t_len: int
    p: int = 1
    sigma: SigmaSpec = field(default_factory=SigmaSpec)
    kappa: float = 0.5
    kappas: tuple = None
    replicates: int = 100
    seed: int = 0
    methods: tuple = METHODS
    noise: str = "derived"
    cv: CvSpec = field(default_factory=CvSpec)
    fixed_lambda: dict = None
    record_timing: bool = False

    def __post_init__(self):
        if self.replicates < 1:
            raise BadParams("replicates must be >= 1")
        if self.d < 2 or self.t_len < 2 or self.p < 1:
            raise BadParams("need d >= 2, t_len >= 2 and p >= 1")
        if not self.methods or any(m not in METHODS for m in self.methods):
            raise BadParams(f"methods must be a non-empty subset of {METHODS}")
        if self.noise not in NOISE_MODES:
            raise BadParams(f"noise must be one of {NOISE_MODES}")
        if self.noise == "derived" and self.p != 1:
            raise BadParams("noise 'derived' builds Psi from Sigma and needs p = 1")
        if self.fixed_lambda is not None and any(m not in self.fixed_lambda for m in self.methods):
            raise BadParams("fixed_lambda needs a value for every method")
        for k in self.kappa_values:
            if not k > 0:
                raise BadParams("kappa must be positive")

    @property
    def kappa_values(self):
        return tuple(self.kappas) if self.kappas else (self.kappa,)

    @classmethod
    def from_dict(cls, raw):
        raw = dict(raw)
        try:
            pattern = raw.pop("pattern")
            if isinstance(pattern, str):
                pattern = {"tag": pattern}
            pattern = PatternKind(pattern["tag"], pattern.get("param"))
            sigma = raw.pop("sigma", {"tag": "diagonal"})
            if isinstance(sigma, str):
                sigma = {"tag": sigma}
            sigma = SigmaSpec(sigma["tag"], sigma.get("rho"))
            cv = raw.pop("cv", {}) or {}
            for key in ("p_grid", "lambda_grid", "lambda_range"):
                if cv.get(key) is not None:
                    cv[key] = tuple(cv[key])
            cv = CvSpec(**cv)
            if raw.get("kappas") is not None:
                raw["kappas"] = tuple(float(k) for k in raw["kappas"])
            if "methods" in raw:
                raw["methods"] = tuple(raw["methods"])
            fixed = raw.pop("lambda", None)
            if isinstance(fixed, (int, float)):
                fixed = {m: float(fixed) for m in raw.get("methods", METHODS)}
            return cls(pattern=pattern, sigma=sigma, cv=cv, fixed_lambda=fixed, **raw)
        except (KeyError, TypeError, ValueError) as exc:
            raise BadParams(f"invalid bench config: {exc}") from exc

    def to_dict(self):
        out = asdict(self)
        out["pattern"] = {"tag": self.pattern.tag.value, "param": self.pattern.param}
        out["sigma"] = {"tag": self.sigma.tag.value, "rho": self.sigma.rho}
        out["lambda"] = out.pop("fixed_lambda")
        out["methods"] = list(self.methods)
        return out


@dataclass(frozen=True)
class BenchRow:
    kappa: float
    method: str
    n_ok: int
    n_failed: int
    mean_lf: float
    sd_lf: float
    mean_l2: float
    sd_l2: float
    mean_l1: float
    sd_l1: float
    mean_wall_time: float = None


def lag_seed(seed, k):
    """Independent per-lag pattern seed derived from a replicate seed."""
    return int(np.random.SeedSequence([seed, k]).generate_state(1)[0])


def build_model(pattern, d, p, kappa, seed, sigma=None, noise="derived"):
    """Ground-truth model for one replicate; returns the :class:`VarModel`.

    ``noise='derived'`` is the lag-1 construction (rescale ``A_1``, build
    ``Sigma`` and set ``Psi = Sigma - A_1' Sigma A_1``); ``'identity'`` uses
    ``Psi = I`` and rescales every lag to ``kappa``.
    """
    if noise == "derived":
        a1 = rescale_spectral(gen_pattern(pattern, d, seed), kappa)
        model, _ = make_var1_model(a1, sigma or SigmaSpec())
        return model
    patterns = [gen_pattern(pattern, d, seed if p == 1 else lag_seed(seed, k)) for k in range(p)]
    model, _ = make_varp_model(patterns, kappa, np.eye(d))
    return model


def _lambda_grid(cfg, x):
    p_grid = cfg.cv.p_grid or (cfg.p,)
    if cfg.cv.lambda_grid is not None:
        return [(int(p), float(lam)) for p in p_grid for lam in cfg.cv.lambda_grid]
    lo, hi, n = cfg.cv.lambda_range
    return default_grid(x, p_grid, int(n), lo, hi)


def _fit(method, x, p, lam):
    if method == "direct":
        est = estimate_direct(x, p, lam)
        return est.lags, len(est.infeasible_columns)
    if method == "lasso":
        return estimate_lasso(x, p, lam), 0
    return estimate_ridge(x, p, lam), 0


def tune_and_fit(cfg, method, x):
    """Select ``(p, lambda)`` for one method and refit on the whole series.

    Returns ``(lags, p, lambda_native, n_infeasible)``.
    """
    normalized = cfg.cv.lambda_scale == "normalized"
    if cfg.fixed_lambda is not None:
        p, lam = cfg.p, float(cfg.fixed_lambda[method])
    else:
        n1 = cfg.cv.n1 or cfg.t_len // 2
        n2 = cfg.cv.n2 or cfg.t_len // 2
        res = cross_validate(x, _lambda_grid(cfg, x), n1, n2, method=method, normalized=normalized)
        p, lam = res.best
    if normalized:
        lam = native_penalty(method, lam, x.shape[0] - p)
    lags, n_bad = _fit(method, x, p, lam)
    return lags, p, lam, n_bad


def run_replicate(cfg, kappa, r):
    """Errors of every method on replicate ``r``; one record dict per method."""
    seed = cfg.seed ^ r
    base = {"kappa": float(kappa), "replicate": r, "seed": seed}
    try:
        model = build_model(cfg.pattern, cfg.d, cfg.p, kappa, seed, cfg.sigma, cfg.noise)
        x = simulate(model, cfg.t_len, seed).values
    except DirvarError as exc:
        return [dict(base, method=m, failed=True, reason=type(exc).__name__) for m in cfg.methods]
    truth = list(model.transitions)
    records = []
    for method in cfg.methods:
        rec = dict(base, method=method)
        start = time.perf_counter()
        try:
            lags, p, lam, n_bad = tune_and_fit(cfg, method, x)
        except (AllColumnsInfeasible, DirvarError) as exc:
            records.append(dict(rec, failed=True, reason=type(exc).__name__))
            continue
        elapsed = time.perf_counter() - start
        if len(lags) < len(truth):
            lags = list(lags) + [np.zeros_like(truth[0])] * (len(truth) - len(lags))
        if len(lags) > len(truth):
            truth_ext = truth + [np.zeros_like(truth[0])] * (len(lags) - len(truth))
        else:
            truth_ext = truth
        err = error_norms(list(lags), truth_ext)
        rec.update(
            failed=n_bad > 0,
            reason="infeasible_columns" if n_bad else None,
            p=int(p),
            lam=float(lam),
            infeasible_columns=int(n_bad),
            lf=err.frobenius,
            l2=err.spectral,
            l1=err.induced_l1,
            lmax=err.element_max,
        )
        if cfg.record_timing:
            rec["wall_time"] = elapsed
        records.append(rec)
    return records


def _task(args):
    cfg, kappa, r = args
    return run_replicate(cfg, kappa, r)


def _summary(vals):
    arr = np.asarray(vals, dtype=float)
    if arr.size == 0:
        return math.nan, math.nan
    sd = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return float(arr.mean()), sd


def aggregate(cfg, records):
    rows = []
    for kappa in cfg.kappa_values:
        for method in cfg.methods:
            mine = [r for r in records if r["kappa"] == float(kappa) and r["method"] == method]
            ok = [r for r in mine if not r["failed"]]
            stats = {}
            for key in ("lf", "l2", "l1"):
                stats[f"mean_{key}"], stats[f"sd_{key}"] = _summary([r[key] for r in ok])
            wall = None
            if cfg.record_timing and ok:
                wall = float(np.mean([r["wall_time"] for r in ok]))
            rows.append(BenchRow(float(kappa), method, len(ok), len(mine) - len(ok), mean_wall_time=wall, **stats))
    return rows


def run_bench(cfg, workers=1):
    """Run every ``(kappa, replicate)`` task; returns ``(rows, records)``.

    With ``workers > 1`` the tasks go to a process pool; results are
    reassembled in task order so the output never depends on ``workers``.
    """
    tasks = [(cfg, kappa, r) for kappa in cfg.kappa_values for r in range(cfg.replicates)]
    if workers is None or workers <= 1:
        nested = [_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            nested = list(pool.map(_task, tasks, chunksize=1))
    records = [rec for group in nested for rec in group]
    return aggregate(cfg, records), records


def _fmt(v):
    if v is None:
        return ""
    return format(v, ".10g")


def table_csv(rows, record_timing=False):
    cols = ["kappa", "method", "n_ok", "n_failed", "mean_lf", "sd_lf", "mean_l2", "sd_l2", "mean_l1", "sd_l1"]
    if record_timing:
        cols.append("mean_wall_time")
    lines = [",".join(cols)]
    for row in rows:
        d = asdict(row)
        lines.append(",".join(d[c] if c == "method" else _fmt(d[c]) for c in cols))
    return "\n".join(lines) + "\n"


def _clean(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def results_json(cfg, rows, records):
    payload = {
        "spec_version": SPEC_VERSION,
        "config": cfg.to_dict(),
        "rows": [asdict(r) for r in rows],
        "records": records,
    }
    if not cfg.record_timing:
        for row in payload["rows"]:
            row.pop("mean_wall_time")
    return json.dumps(_clean(payload), indent=2, sort_keys=True) + "\n"
