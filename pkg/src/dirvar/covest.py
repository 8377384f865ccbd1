"""Marginal and lag-1 sample covariances of the augmented series."""

from dataclasses import dataclass

import numpy as np

from .errors import SeriesTooShort


@dataclass(frozen=True)
class CovPair:
    s: np.ndarray
    s1: np.ndarray
    n_marginal: int
    n_lag: int


def augmented_rows(x, p):
    """Rows ``(X_{t+p-1}, ..., X_t)`` for ``t = 1 .. T-p+1`` as a ``(T-p+1, dp)`` array."""
    t_len = x.shape[0]
    n = t_len - p + 1
    return np.hstack([x[p - 1 - k:p - 1 - k + n] for k in range(p)])


def sample_covariances(ts, p):
    """Uncentered ``S`` and ``S1`` of the stacked series.

    ``S`` averages ``X~_t X~_t'`` over the ``T-p+1`` stacked vectors and
    ``S1`` averages ``X~_t X~_{t+1}'`` over the ``T-p`` consecutive pairs.
    No mean is subtracted: the process is zero-mean by assumption.
    """
    x = getattr(ts, "values", ts)
    x = np.asarray(x, dtype=float)
    if p < 1:
        raise ValueError("lag order must be >= 1")
    t_len = x.shape[0]
    if t_len < p + 1:
        raise SeriesTooShort(f"need at least p+1={p + 1} observations, got {t_len}")
    z = augmented_rows(x, p)
    n = z.shape[0]
    s = z.T @ z / n
    s = 0.5 * (s + s.T)
    s1 = z[:-1].T @ z[1:] / (n - 1)
    return CovPair(s=s, s1=s1, n_marginal=n, n_lag=n - 1)
