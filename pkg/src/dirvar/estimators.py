"""Transition-matrix estimators.

* :func:`estimate_direct` -- the L1-minimal matrix whose empirical
  Yule-Walker residual is bounded by ``lambda0`` in max norm, solved column
  by column as independent linear programs;
* :func:`estimate_ridge` and :func:`estimate_lasso` -- penalized least
  squares baselines;
* :func:`theoretical_lambda`, :func:`truncate`, :func:`symmetrize` -- tuning
  and post-processing helpers.

All estimators return the lag matrices ``A_1..A_p`` in the orientation of
the model ``X_t = sum_k A_k' X_{t-k} + Z_t``.
"""

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _lasso, _simplex
from .covest import augmented_rows, sample_covariances
from .errors import AllColumnsInfeasible, SeriesTooShort, UnstableModel
from .linalg import NormKind, as_matrix, matrix_norm, solve_spd
from .lp import FEASIBILITY_TOL, MAX_PIVOTS, PIVOT_TOL, LpStatus, _STATUS

LASSO_TOL = 1e-7
LASSO_MAX_SWEEPS = 10_000


@dataclass(frozen=True)
class DirectEstimate:
    omega_hat: np.ndarray
    lags: tuple
    lambda0: float
    per_column_status: tuple
    pivots: tuple = field(default=())

    def __post_init__(self):
        d = self.omega_hat.shape[1]
        for k, a in enumerate(self.lags):
            if not np.array_equal(a, self.omega_hat[k * d:(k + 1) * d]):
                raise ValueError(f"lag {k + 1} does not match its row block of omega_hat")

    @property
    def infeasible_columns(self):
        return [j for j, st in enumerate(self.per_column_status) if st is not LpStatus.OPTIMAL]


@dataclass(frozen=True)
class TuningInputs:
    sigma_norm2: float
    sigma_diag_max: float
    sigma_diag_min: float
    a_norm2: float
    m_d: float
    c_const: float = 32.0

    def __post_init__(self):
        if self.sigma_diag_min <= 0:
            raise ValueError("sigma_diag_min must be positive")


@dataclass(frozen=True)
class LassoFit:
    lags: tuple
    converged: bool
    sweeps: int


def split_lags(stacked, p):
    """Row blocks ``J_k`` of a ``dp x d`` matrix as a tuple of ``d x d`` lags."""
    stacked = np.asarray(stacked)
    d = stacked.shape[1]
    return tuple(stacked[k * d:(k + 1) * d].copy() for k in range(p))


def _solve_column_block(s, rhs, lambdas):
    return _simplex.dual_path(s, rhs, lambdas, PIVOT_TOL, FEASIBILITY_TOL, MAX_PIVOTS)


def solve_direct_path(s, s1_cols, lambdas, workers=1):
    """Solve every column LP at each value of ``lambdas``.

    Values are processed in decreasing order so each solve warm-starts from
    the previous optimal basis.  Returns ``(betas, statuses, pivots)``
    aligned with the input order: ``betas`` has shape ``(nl, m, d)``.

    Columns are split into contiguous chunks handed to a thread pool (the
    compiled kernel releases the GIL).  Each column is solved independently,
    so the result is bitwise independent of ``workers``.
    """
    s = np.ascontiguousarray(s, dtype=float)
    s1_cols = np.ascontiguousarray(s1_cols, dtype=float)
    lambdas = np.asarray(lambdas, dtype=float).reshape(-1)
    if np.any(lambdas < 0) or not np.all(np.isfinite(lambdas)):
        raise ValueError("lambda0 must be finite and nonnegative")
    order = np.argsort(-lambdas, kind="stable")
    lam_desc = np.ascontiguousarray(lambdas[order])
    m, d = s1_cols.shape
    if workers is None or workers < 1:
        workers = 1
    workers = min(workers, d)
    if workers == 1:
        codes, omegas, pivots = _solve_column_block(s, s1_cols, lam_desc)
    else:
        bounds = np.linspace(0, d, workers + 1).astype(int)
        chunks = [np.ascontiguousarray(s1_cols[:, a:b]) for a, b in zip(bounds[:-1], bounds[1:])]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda r: _solve_column_block(s, r, lam_desc), chunks))
        codes = np.concatenate([p[0] for p in parts], axis=1)
        omegas = np.concatenate([p[1] for p in parts], axis=2)
        pivots = np.concatenate([p[2] for p in parts], axis=1)
    if np.any(codes == _simplex.ITERATION_LIMIT):
        raise RuntimeError("simplex hit the pivot cap")
    inv = np.empty_like(order)
    inv[order] = np.arange(order.size)
    betas = (omegas[:, :m] - omegas[:, m:])[inv]
    statuses = [tuple(_STATUS[int(c)] for c in row) for row in codes[inv]]
    pivots = [tuple(int(v) for v in row) for row in pivots[inv]]
    return betas, statuses, pivots


def solve_direct_columns(s, s1_cols, lambda0, workers=1):
    """Solve every column LP at a single ``lambda0``; returns ``(beta, statuses, pivots)``."""
    betas, statuses, pivots = solve_direct_path(s, s1_cols, [lambda0], workers)
    return betas[0], statuses[0], pivots[0]


def _make_estimate(beta, statuses, pivots, p, lambda0):
    return DirectEstimate(
        omega_hat=beta,
        lags=split_lags(beta, p),
        lambda0=float(lambda0),
        per_column_status=statuses,
        pivots=pivots,
    )


def direct_from_covariances(cov, p, lambda0, workers=1):
    d = cov.s.shape[0] // p
    beta, statuses, pivots = solve_direct_columns(cov.s, cov.s1[:, :d], lambda0, workers)
    if all(st is not LpStatus.OPTIMAL for st in statuses):
        raise AllColumnsInfeasible(f"every column LP is infeasible at lambda0={lambda0:g}")
    return _make_estimate(beta, statuses, pivots, p, lambda0)


def direct_path_from_covariances(cov, p, lambdas, workers=1):
    """Direct estimates at several ``lambda0`` values sharing one warm-started path.

    Returns a list aligned with ``lambdas``; an entry is ``None`` when every
    column is infeasible at that value.
    """
    d = cov.s.shape[0] // p
    betas, statuses, pivots = solve_direct_path(cov.s, cov.s1[:, :d], lambdas, workers)
    out = []
    for beta, st, pv, lam in zip(betas, statuses, pivots, lambdas):
        if all(x is not LpStatus.OPTIMAL for x in st):
            out.append(None)
        else:
            out.append(_make_estimate(beta, st, pv, p, lam))
    return out


def estimate_direct(ts, p, lambda0, workers=1):
    """Direct LP estimate of ``A_1..A_p`` from a series.

    Infeasible columns are left at zero and flagged in
    ``per_column_status``; :class:`AllColumnsInfeasible` is raised only when
    no column admits a solution.
    """
    if lambda0 < 0:
        raise ValueError("lambda0 must be nonnegative")
    return direct_from_covariances(sample_covariances(ts, p), p, lambda0, workers)


def theoretical_lambda(inputs, d, p, t_len):
    """Population tuning parameter from the convergence theory.

    For ``p == 1``::

        32 |Sigma|_2 max_j Sigma_jj (2 M_d + 3) / (min_j Sigma_jj (1 - |A|_2)) * sqrt(log d / T)

    For ``p > 1`` the companion quantities are used with the generic
    constant ``c_const`` and rate ``sqrt((log d + log p) / (T - p))``.
    """
    if inputs.a_norm2 >= 1.0:
        raise UnstableModel(f"|A|_2 = {inputs.a_norm2:g} >= 1; the tuning formula diverges")
    if t_len <= p:
        raise SeriesTooShort("t_len must exceed p")
    ratio = inputs.sigma_norm2 * inputs.sigma_diag_max / (inputs.sigma_diag_min * (1.0 - inputs.a_norm2))
    if p == 1:
        return 32.0 * ratio * (2.0 * inputs.m_d + 3.0) * math.sqrt(math.log(d) / t_len)
    return inputs.c_const * ratio * max(inputs.m_d, 1.0) * math.sqrt((math.log(d) + math.log(p)) / (t_len - p))


def tuning_inputs_from_model(model, c_const=32.0):
    """Population :class:`TuningInputs` of a stationary model.

    For ``p > 1`` the companion matrix contains identity blocks, so its
    spectral norm is at least one and :func:`theoretical_lambda` will refuse
    it.
    """
    from .varproc import augment, stationary_covariance

    sigma = stationary_covariance(model)
    a_tilde = augment(model).a_tilde
    diag = np.diag(sigma)
    return TuningInputs(
        sigma_norm2=matrix_norm(sigma, NormKind.SPECTRAL),
        sigma_diag_max=float(diag.max()),
        sigma_diag_min=float(diag.min()),
        a_norm2=matrix_norm(a_tilde, NormKind.SPECTRAL),
        m_d=matrix_norm(a_tilde, NormKind.INDUCED_L1),
        c_const=c_const,
    )


def truncate(estimate, gamma):
    """Zero every entry with magnitude below ``gamma``."""
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    a = np.asarray(estimate, dtype=float)
    return np.where(np.abs(a) >= gamma, a, 0.0)


def symmetrize(estimate):
    """Symmetric estimate keeping, for each off-diagonal pair, the smaller-magnitude entry.

    On exact magnitude ties the upper-triangular entry ``(j, k), j < k`` wins.
    """
    a = as_matrix(estimate)
    if a.shape[0] != a.shape[1]:
        raise ValueError("symmetrize needs a square matrix")
    upper = np.triu(a, 1)
    lower_t = np.triu(a.T, 1)
    keep = np.where(np.abs(lower_t) < np.abs(upper), lower_t, upper)
    return keep + keep.T + np.diag(np.diag(a))


def regression_design(ts, p):
    """``(Z, Y)`` with rows ``Z_t = (X_t, ..., X_{t-p+1})`` and ``Y_t = X_{t+1}``."""
    x = np.asarray(getattr(ts, "values", ts), dtype=float)
    if x.shape[0] < p + 1:
        raise SeriesTooShort(f"need at least p+1={p + 1} observations, got {x.shape[0]}")
    z = augmented_rows(x, p)[:-1]
    return z, x[p:]


def native_penalty(method, lam0, n_rows):
    """Convert a penalty on the covariance scale to the estimator's own units.

    ``lam0`` bounds the residual ``|S v - s1|_inf`` for the direct method.
    The lasso optimality conditions give the same bound when its penalty is
    ``2 n lam0`` with ``n`` regression rows; for ridge ``n lam0`` adds
    ``lam0 I`` to the sample covariance.  Grids stated on this scale are
    therefore comparable across methods and window sizes.
    """
    if method == "direct":
        return float(lam0)
    if method == "lasso":
        return 2.0 * n_rows * float(lam0)
    if method == "ridge":
        return n_rows * float(lam0)
    raise ValueError(f"unknown method {method!r}")


def ridge_from_gram(gram, zty, gamma, p):
    reg = gram + gamma * np.eye(gram.shape[0])
    return split_lags(solve_spd(reg, zty), p)


def estimate_ridge(ts, p, gamma):
    """``(Z'Z + gamma I)^{-1} Z'Y`` split into lag blocks."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    z, y = regression_design(ts, p)
    return ridge_from_gram(z.T @ z, z.T @ y, gamma, p)


def lasso_from_gram(gram, zty, lam, p, beta0=None):
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    gram = np.ascontiguousarray(gram, dtype=float)
    zty = np.ascontiguousarray(zty, dtype=float)
    if beta0 is None:
        beta0 = np.zeros_like(zty)
    beta, sweeps, conv = _lasso.coordinate_descent(
        gram, zty, float(lam), np.ascontiguousarray(beta0, dtype=float), LASSO_TOL, LASSO_MAX_SWEEPS
    )
    converged = bool(conv.all())
    if not converged:
        warnings.warn(
            f"lasso coordinate descent hit {LASSO_MAX_SWEEPS} sweeps at lambda={lam:g}",
            RuntimeWarning,
            stacklevel=2,
        )
    return LassoFit(split_lags(beta, p), converged, int(sweeps.max()))


def estimate_lasso(ts, p, lam):
    """Minimize ``|Y - Z M|_F^2 + lam * sum|M_ij|`` by cyclic coordinate descent.

    Each response column is an independent problem.  When the sweep cap is
    hit the last iterate is returned and a :class:`RuntimeWarning` is issued;
    use :func:`lasso_from_gram` to read the convergence flag directly.
    """
    z, y = regression_design(ts, p)
    return lasso_from_gram(z.T @ z, z.T @ y, lam, p).lags
