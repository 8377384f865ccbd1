"""Error metrics, sign recovery, one-step prediction and rolling cross-validation."""

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .covest import sample_covariances
from .errors import AllColumnsInfeasible, DimensionMismatch, WindowTooLarge
from .estimators import (
    direct_path_from_covariances,
    lasso_from_gram,
    native_penalty,
    regression_design,
    ridge_from_gram,
)
from .linalg import NormKind, as_matrix, matrix_norm

SPEC_VERSION = "1.0"


@dataclass(frozen=True)
class ErrorReport:
    frobenius: float
    spectral: float
    induced_l1: float
    element_max: float

    def as_dict(self):
        return asdict(self)


def stack_lags(lags):
    return np.vstack([as_matrix(a) for a in lags])


def error_norms(estimate, truth):
    """Norms of ``estimate - truth``; both may be stacked matrices or lists of lags."""
    est = stack_lags(estimate) if isinstance(estimate, (list, tuple)) else as_matrix(estimate)
    tru = stack_lags(truth) if isinstance(truth, (list, tuple)) else as_matrix(truth)
    if est.shape != tru.shape:
        raise DimensionMismatch(f"estimate {est.shape} vs truth {tru.shape}")
    diff = est - tru
    return ErrorReport(
        frobenius=matrix_norm(diff, NormKind.FROBENIUS),
        spectral=matrix_norm(diff, NormKind.SPECTRAL),
        induced_l1=matrix_norm(diff, NormKind.INDUCED_L1),
        element_max=matrix_norm(diff, NormKind.ELEMENT_MAX),
    )


def sign_metrics(truncated, truth):
    """Sign agreement and support precision/recall.

    An empty estimated support has precision 1 by convention; an empty true
    support has recall 1.
    """
    est = as_matrix(truncated)
    tru = as_matrix(truth)
    if est.shape != tru.shape:
        raise DimensionMismatch(f"estimate {est.shape} vs truth {tru.shape}")
    est_nz = est != 0
    tru_nz = tru != 0
    hits = np.sum(est_nz & tru_nz)
    precision = float(hits / est_nz.sum()) if est_nz.any() else 1.0
    recall = float(hits / tru_nz.sum()) if tru_nz.any() else 1.0
    exact = bool(np.array_equal(np.sign(est), np.sign(tru)))
    return {"exact_match": exact, "support_precision": precision, "support_recall": recall}


def predict_next(lags, history):
    """One-step forecast ``sum_k A_k' X_{T+1-k}``.

    ``history`` holds the last ``p`` observations in time order, so
    ``history[-1]`` is ``X_T``.
    """
    hist = np.atleast_2d(np.asarray(history, dtype=float))
    p = len(lags)
    if hist.shape[0] != p:
        raise DimensionMismatch(f"history has {hist.shape[0]} rows, expected p={p}")
    d = lags[0].shape[0]
    if hist.shape[1] != d:
        raise DimensionMismatch(f"history has dimension {hist.shape[1]}, expected {d}")
    out = np.zeros(d)
    for k, a in enumerate(lags, start=1):
        out += a.T @ hist[-k]
    return out


@dataclass
class CvResult:
    grid: list
    mean_err: list
    best: tuple
    n1: int
    n2: int
    t0: int
    method: str
    infeasible_columns: list = field(default_factory=list)
    failed_fits: list = field(default_factory=list)

    def to_json(self):
        payload = {
            "spec_version": SPEC_VERSION,
            "method": self.method,
            "grid": [{"p": int(p), "lambda": float(lam)} for p, lam in self.grid],
            "mean_err": [None if not math.isfinite(e) else float(e) for e in self.mean_err],
            "best": {"p": int(self.best[0]), "lambda": float(self.best[1])},
            "n1": self.n1,
            "n2": self.n2,
            "t0": self.t0,
            "infeasible_columns": [int(c) for c in self.infeasible_columns],
            "failed_fits": [int(c) for c in self.failed_fits],
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def _fit_path(method, window, p, lambdas, workers, normalized=False):
    """Fit one training window at every penalty in ``lambdas``.

    With ``normalized`` the penalties are on the covariance scale of
    :func:`native_penalty` and converted using the window's row count.
    Returns a list aligned with ``lambdas``; each item is ``(lags, n_infeasible)``
    or ``None`` when the fit failed entirely.
    """
    out = [None] * len(lambdas)
    if method == "direct":
        cov = sample_covariances(window, p)
        for i, est in enumerate(direct_path_from_covariances(cov, p, lambdas, workers)):
            if est is not None:
                out[i] = (est.lags, len(est.infeasible_columns))
        return out
    z, y = regression_design(window, p)
    gram, zty = z.T @ z, z.T @ y
    if normalized:
        lambdas = [native_penalty(method, lam, z.shape[0]) for lam in lambdas]
    if method == "ridge":
        for i, lam in enumerate(lambdas):
            out[i] = (ridge_from_gram(gram, zty, lam, p), 0)
        return out
    if method == "lasso":
        # warm start along decreasing penalties
        beta = None
        for i in sorted(range(len(lambdas)), key=lambda i: -lambdas[i]):
            fit = lasso_from_gram(gram, zty, lambdas[i], p, beta)
            beta = np.vstack(fit.lags)
            out[i] = (fit.lags, 0)
        return out
    raise ValueError(f"unknown method {method!r}")


def default_grid(ts, p_values=(1,), n_points=20, lo=0.01, hi=2.0):
    """``(p, lambda)`` pairs with ``n_points`` log-spaced values in ``[lo, hi] * |S1|_max``.

    ``S1`` is the lag-1 sample covariance of the whole series, so the grid is
    on the covariance scale (use ``normalized=True`` for lasso and ridge).
    """
    x = np.asarray(getattr(ts, "values", ts), dtype=float)
    scale = float(np.max(np.abs(sample_covariances(x, 1).s1)))
    lams = np.geomspace(lo, hi, n_points) * scale
    return [(int(p), float(lam)) for p in p_values for lam in lams]


def cross_validate(ts, grid, n1, n2, t0=None, method="direct", workers=1, normalized=False):
    """Rolling-origin choice of ``(p, lambda)`` by one-step prediction error.

    Indices are 0-based rows of ``ts``.  For every evaluation row ``t`` in
    ``t0-n2 .. t0-1`` and every grid point the model is fitted on rows
    ``t-n1 .. t-1`` and scored by ``|X_t - sum_k A_k' X_{t-k}|_2``.  ``t0``
    defaults to the series length, i.e. the last ``n2`` rows are evaluated.
    The grid point with the smallest mean error wins; ties go to the smaller
    ``p`` and then to the larger ``lambda``.

    ``lambda`` is in the estimator's own units unless ``normalized`` is set,
    in which case it is on the common covariance scale of
    :func:`~dirvar.estimators.native_penalty`.
    """
    x = np.asarray(getattr(ts, "values", ts), dtype=float)
    grid = [(int(p), float(lam)) for p, lam in grid]
    if not grid:
        raise ValueError("empty grid")
    t0 = x.shape[0] if t0 is None else int(t0)
    max_p = max(p for p, _ in grid)
    if n2 < 1 or t0 > x.shape[0] or t0 - n2 - n1 < 0:
        raise WindowTooLarge(f"windows n1={n1}, n2={n2} do not fit before t0={t0} in a series of {x.shape[0]}")
    if n1 < max_p + 1:
        raise WindowTooLarge(f"training window n1={n1} is too short for lag {max_p}")

    by_p = {}
    for i, (p, lam) in enumerate(grid):
        by_p.setdefault(p, []).append(i)

    errs = np.zeros(len(grid))
    infeasible = np.zeros(len(grid), dtype=int)
    failed = np.zeros(len(grid), dtype=int)
    for t in range(t0 - n2, t0):
        window = x[t - n1:t]
        for p, idx in by_p.items():
            fits = _fit_path(method, window, p, [grid[i][1] for i in idx], workers, normalized)
            history = x[t - p:t]
            for i, fit in zip(idx, fits):
                if fit is None:
                    failed[i] += 1
                    continue
                lags, n_bad = fit
                infeasible[i] += n_bad
                errs[i] += np.linalg.norm(x[t] - predict_next(lags, history))
    mean_err = [errs[i] / n2 if failed[i] == 0 else math.inf for i in range(len(grid))]
    if all(math.isinf(e) for e in mean_err):
        raise AllColumnsInfeasible("every grid point failed in at least one window")
    best_i = min(range(len(grid)), key=lambda i: (mean_err[i], grid[i][0], -grid[i][1]))
    return CvResult(
        grid=grid,
        mean_err=mean_err,
        best=grid[best_i],
        n1=n1,
        n2=n2,
        t0=t0,
        method=method,
        infeasible_columns=infeasible.tolist(),
        failed_fits=failed.tolist(),
    )
