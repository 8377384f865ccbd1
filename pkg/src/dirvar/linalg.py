"""Dense matrix kernels: validation, Cholesky, SPD solves, norms, CSV I/O.

Matrices are plain ``numpy.ndarray`` objects of dtype float64.  Functions
here never mutate their inputs.
"""

from enum import Enum

import numpy as np
from scipy.linalg import matrix_balance, solve_triangular

from .errors import DimensionMismatch, MatrixOverflow, NotPositiveDefinite

# Tolerances shared across the package.
PIVOT_TOL = 1e-12
RESIDUAL_TOL = 1e-10
POWER_ITER_TOL = 1e-10
POWER_ITER_MAX = 10_000
SYMMETRY_TOL = 1e-10


class NormKind(Enum):
    FROBENIUS = "frobenius"
    SPECTRAL = "spectral"
    INDUCED_L1 = "induced_l1"
    INDUCED_LINF = "induced_linf"
    ELEMENT_MAX = "element_max"


def as_matrix(m, name="matrix"):
    """Return ``m`` as a 2-D float64 array, rejecting empty or non-finite input."""
    a = np.asarray(m, dtype=float)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise DimensionMismatch(f"{name} must be a non-empty 2-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains NaN or Inf")
    return a


def _require_square(a, name="matrix"):
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {a.shape}")


def cholesky(m):
    """Lower-triangular ``L`` with ``L @ L.T == m``.

    A column-by-column factorization; a pivot at or below
    ``PIVOT_TOL * max(diag(m))`` raises :class:`NotPositiveDefinite`.
    """
    a = as_matrix(m)
    _require_square(a)
    scale = max(np.max(np.abs(a)), 1e-300)
    if np.max(np.abs(a - a.T)) > SYMMETRY_TOL * scale:
        raise NotPositiveDefinite("matrix is not symmetric")
    n = a.shape[0]
    threshold = PIVOT_TOL * max(np.max(np.diag(a)), 0.0)
    L = np.zeros_like(a)
    for j in range(n):
        pivot = a[j, j] - L[j, :j] @ L[j, :j]
        if pivot <= threshold or pivot <= 0.0:
            raise NotPositiveDefinite(f"pivot {pivot:.3e} at index {j}")
        ljj = np.sqrt(pivot)
        L[j, j] = ljj
        if j + 1 < n:
            L[j + 1:, j] = (a[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]) / ljj
    return L


def solve_spd(m, rhs):
    """Solve ``m @ x = rhs`` for symmetric positive definite ``m``."""
    a = as_matrix(m)
    b = np.asarray(rhs, dtype=float)
    vector = b.ndim == 1
    b = as_matrix(b, "rhs")
    if b.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"rhs has {b.shape[0]} rows, matrix has {a.shape[1]} columns")
    L = cholesky(a)
    y = solve_triangular(L, b, lower=True)
    x = solve_triangular(L.T, y, lower=False)
    return x.ravel() if vector else x


def _power_iteration(g, v, tol, max_iter):
    w = g @ v
    lam = float(v @ w)
    for _ in range(max_iter):
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
        w = g @ v
        lam = float(v @ w)
        if np.linalg.norm(w - lam * v) <= tol * lam:
            break
    return lam


def spectral_norm(m, tol=POWER_ITER_TOL, max_iter=POWER_ITER_MAX):
    """Largest singular value by power iteration on ``m.T @ m``.

    Iteration stops once the eigen-residual of ``m.T @ m`` falls below
    ``tol`` relative to the Rayleigh quotient.  Two deterministic starts are
    used, the normalized all-ones vector and a fixed-seed Gaussian vector,
    and the larger estimate wins; a single start can be exactly orthogonal to
    the dominant singular vector (for example on sign-alternating matrices).
    """
    a = as_matrix(m)
    if not np.any(a):
        return 0.0
    g = a.T @ a
    n = g.shape[0]
    starts = (np.ones(n) / np.sqrt(n), np.random.default_rng(0).standard_normal(n))
    best = 0.0
    for v in starts:
        best = max(best, _power_iteration(g, v / np.linalg.norm(v), tol, max_iter))
    return float(np.sqrt(best))


def matrix_norm(m, kind):
    """Norm of ``m``; ``kind`` is a :class:`NormKind` or its string value."""
    a = as_matrix(m)
    kind = NormKind(kind)
    if kind is NormKind.FROBENIUS:
        return float(np.sqrt(np.sum(a * a)))
    if kind is NormKind.SPECTRAL:
        return spectral_norm(a)
    if kind is NormKind.INDUCED_L1:
        return float(np.max(np.sum(np.abs(a), axis=0)))
    if kind is NormKind.INDUCED_LINF:
        return float(np.max(np.sum(np.abs(a), axis=1)))
    return float(np.max(np.abs(a)))


def spectral_radius_bound(m, power=32):
    """Upper bound ``||m**power||_2 ** (1/power)`` on the spectral radius.

    ``power`` must be a power of two; the matrix power is formed by repeated
    squaring.  The matrix is first balanced by a diagonal similarity, which
    leaves the spectrum unchanged but stops small entries from underflowing.
    Intermediate matrices are rescaled to unit max-entry to keep them
    representable; :class:`MatrixOverflow` is raised only when the
    accumulated log-scale itself stops being finite.
    """
    a = as_matrix(m)
    _require_square(a)
    if power < 1 or power & (power - 1):
        raise ValueError(f"power must be a power of two, got {power}")
    with np.errstate(invalid="ignore"):
        a, _ = matrix_balance(a, permute=False)
    log_scale = 0.0
    cur = a.copy()
    k = power
    with np.errstate(over="raise", invalid="raise"):
        try:
            while k > 1:
                s = np.max(np.abs(cur))
                if s == 0.0:
                    return 0.0
                cur = cur / s
                log_scale = 2.0 * (log_scale + np.log(s))
                cur = cur @ cur
                k //= 2
        except FloatingPointError as exc:
            raise MatrixOverflow("matrix power overflowed") from exc
    if not np.isfinite(log_scale):
        raise MatrixOverflow("matrix power overflowed")
    nrm = spectral_norm(cur)
    if nrm == 0.0:
        return 0.0
    return float(np.exp((np.log(nrm) + log_scale) / power))


def is_symmetric(m, tol=SYMMETRY_TOL):
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    scale = max(np.max(np.abs(a)), 1.0)
    return bool(np.max(np.abs(a - a.T)) <= tol * scale)


def min_ldl_pivot(m):
    """Smallest pivot of a symmetric Gaussian elimination with diagonal pivoting.

    Used as a semidefiniteness test: a PSD matrix has all pivots ``>= 0`` up
    to round-off.  At each step the largest remaining diagonal entry is
    eliminated, so zero pivots of a semidefinite matrix do not poison later
    steps.
    """
    a = as_matrix(m).copy()
    _require_square(a)
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    remaining = list(range(n))
    smallest = np.inf
    for _ in range(n):
        diag = a[remaining, remaining]
        k = remaining[int(np.argmax(diag))]
        piv = a[k, k]
        smallest = min(smallest, piv)
        remaining.remove(k)
        if piv > 0.0 and remaining:
            r = np.array(remaining)
            col = a[r, k]
            a[np.ix_(r, r)] -= np.outer(col, col) / piv
        elif piv <= 0.0:
            # every remaining diagonal entry is <= piv, nothing left to eliminate
            rest = np.diag(a)[remaining] if remaining else np.array([])
            if rest.size:
                smallest = min(smallest, float(rest.min()))
            break
    return float(smallest)


def write_matrix_csv(path, m):
    """Write ``m`` as comma-separated rows with 17 significant digits."""
    a = np.atleast_2d(np.asarray(m, dtype=float))
    with open(path, "w") as fh:
        for row in a:
            fh.write(",".join(format(v, ".17g") for v in row) + "\n")


def read_matrix_csv(path):
    """Read a headerless numeric CSV written by :func:`write_matrix_csv`."""
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append([float(tok) for tok in line.split(",")])
    if not rows:
        raise DimensionMismatch(f"{path} holds no data")
    return as_matrix(np.array(rows), str(path))
