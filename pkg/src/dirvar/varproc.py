"""Stationary VAR(p) processes.

The model is ``X_t = sum_k A_k.T @ X_{t-k} + Z_t`` with ``Z_t ~ N(0, Psi)``.
Note the transpose: column ``j`` of ``A_k`` holds the coefficients of the
``j``-th response.  The companion (augmented) form stacks
``(X_{t+p-1}, ..., X_t)`` into a ``dp``-vector that follows a VAR(1) with
transition ``a_tilde``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NoConvergence, NotPositiveDefinite, NotStationary
from .linalg import as_matrix, cholesky, is_symmetric, spectral_radius_bound

STATIONARITY_MARGIN = 1e-6
LYAPUNOV_TOL = 1e-12
LYAPUNOV_MAX_ITER = 100_000
BURN_IN = 500


@dataclass(frozen=True)
class VarModel:
    transitions: tuple
    noise_cov: np.ndarray

    def __post_init__(self):
        mats = tuple(as_matrix(a, f"A_{k + 1}") for k, a in enumerate(self.transitions))
        if not mats:
            raise DimensionMismatch("a VAR model needs at least one transition matrix")
        d = mats[0].shape[0]
        for a in mats:
            if a.shape != (d, d):
                raise DimensionMismatch(f"transition matrices must all be {d}x{d}")
        psi = as_matrix(self.noise_cov, "noise_cov")
        if psi.shape != (d, d):
            raise DimensionMismatch(f"noise_cov must be {d}x{d}, got {psi.shape}")
        if not is_symmetric(psi):
            raise ValueError("noise_cov must be symmetric")
        object.__setattr__(self, "transitions", mats)
        object.__setattr__(self, "noise_cov", psi)

    @property
    def p(self):
        return len(self.transitions)

    @property
    def d(self):
        return self.transitions[0].shape[0]

    def stacked(self):
        """``(A_1; ...; A_p)`` as a ``dp x d`` matrix."""
        return np.vstack(self.transitions)


@dataclass(frozen=True)
class CompanionForm:
    a_tilde: np.ndarray
    psi_tilde: np.ndarray


@dataclass(frozen=True)
class TimeSeries:
    values: np.ndarray

    def __post_init__(self):
        v = as_matrix(self.values, "series")
        object.__setattr__(self, "values", v)

    @property
    def t_len(self):
        return self.values.shape[0]

    @property
    def dim(self):
        return self.values.shape[1]

    def window(self, start, stop):
        return TimeSeries(self.values[start:stop])


def augment(model):
    """Companion form of a VAR(p) model.

    ``a_tilde`` has ``A_1..A_p`` stacked in its first block column and
    identity blocks on the block superdiagonal; ``psi_tilde`` carries ``Psi``
    in its top-left block only.
    """
    d, p = model.d, model.p
    if p == 1:
        return CompanionForm(model.transitions[0], model.noise_cov)
    a_tilde = np.zeros((d * p, d * p))
    a_tilde[:, :d] = model.stacked()
    for k in range(p - 1):
        a_tilde[k * d:(k + 1) * d, (k + 1) * d:(k + 2) * d] = np.eye(d)
    psi_tilde = np.zeros((d * p, d * p))
    psi_tilde[:d, :d] = model.noise_cov
    return CompanionForm(a_tilde, psi_tilde)


def is_stationary(model):
    return spectral_radius_bound(augment(model).a_tilde, 32) < 1.0 - STATIONARITY_MARGIN


def _lyapunov_fixed_point(a, q, tol, max_iter):
    sigma = q.copy()
    at = a.T
    scale = max(1.0, float(np.max(np.abs(q))))
    best = np.inf
    stalled = 0
    for _ in range(max_iter):
        nxt = at @ sigma @ a + q
        diff = float(np.max(np.abs(nxt - sigma)))
        if diff < tol:
            return nxt
        # round-off floor for covariances well above unit scale
        if diff < best:
            best, stalled = diff, 0
        else:
            stalled += 1
            if stalled > 50 and diff < tol * scale:
                return nxt
        sigma = nxt
    raise NoConvergence(f"Lyapunov iteration did not converge in {max_iter} steps")


def stationary_covariance(model, tol=LYAPUNOV_TOL, max_iter=LYAPUNOV_MAX_ITER):
    """Solve ``A~' S A~ - S + Psi~ = 0`` for the companion covariance ``S``.

    Fixed-point iteration ``S <- A~' S A~ + Psi~`` started at ``Psi~``; it
    converges geometrically at rate ``rho(A~)**2``.
    """
    if not is_stationary(model):
        raise NotStationary("model is not stationary")
    comp = augment(model)
    sigma = _lyapunov_fixed_point(comp.a_tilde, comp.psi_tilde, tol, max_iter)
    return 0.5 * (sigma + sigma.T)


def lyapunov_residual(model, sigma_tilde):
    comp = augment(model)
    a = comp.a_tilde
    return float(np.max(np.abs(a.T @ sigma_tilde @ a - sigma_tilde + comp.psi_tilde)))


def lag1_autocov(sigma, a_tilde):
    """Population lag-1 autocovariance ``Cov(X_t, X_{t+1}) = sigma @ a_tilde``."""
    sigma = as_matrix(sigma, "sigma")
    a_tilde = as_matrix(a_tilde, "a_tilde")
    if sigma.shape[1] != a_tilde.shape[0]:
        raise DimensionMismatch(f"cannot multiply {sigma.shape} by {a_tilde.shape}")
    return sigma @ a_tilde


def standard_normals(seed, shape):
    """Standard normal draws by Box-Muller over a Philox counter-based stream."""
    n = int(np.prod(shape))
    gen = np.random.Generator(np.random.Philox(key=int(seed) & (2**64 - 1)))
    half = (n + 1) // 2
    # interleaved pairs keep a shorter draw a prefix of a longer one
    u = gen.random(2 * half)
    # map [0, 1) onto (0, 1] so the log is finite
    u1 = 1.0 - u[0::2]
    r = np.sqrt(-2.0 * np.log(u1))
    ang = 2.0 * np.pi * u[1::2]
    z = np.empty(2 * half)
    z[0::2] = r * np.cos(ang)
    z[1::2] = r * np.sin(ang)
    return z[:n].reshape(shape)


def simulate(model, t_len, seed, *, burn_in=None):
    """Draw ``t_len`` observations of a stationary VAR(p) process.

    By default the first ``p`` observations are drawn exactly from the
    stationary law ``N(0, Sigma~)``.  Passing ``burn_in`` (a number of steps)
    instead starts from zero and discards that many steps; this is the
    fallback for models whose ``Sigma~`` is numerically semidefinite.
    """
    d, p = model.d, model.p
    if t_len < p:
        raise ValueError(f"t_len={t_len} is shorter than the lag order {p}")
    if not is_stationary(model):
        raise NotStationary("model is not stationary")
    l_psi = cholesky(model.noise_cov)
    extra = 0 if burn_in is None else int(burn_in)
    steps = t_len - p + extra
    n_init = d * p if burn_in is None else 0
    eta = standard_normals(seed, n_init + steps * d)
    noise = eta[n_init:].reshape(steps, d) @ l_psi.T
    x = np.zeros((t_len + extra, d))
    if burn_in is None:
        l_sigma = cholesky(stationary_covariance(model))
        # the augmented state is (X_p, ..., X_1)
        state = l_sigma @ eta[:n_init]
        for k in range(p):
            x[p - 1 - k] = state[k * d:(k + 1) * d]
    a_t = [a.T.copy() for a in model.transitions]
    for i, t in enumerate(range(p, t_len + extra)):
        acc = noise[i].copy()
        for k in range(p):
            acc += a_t[k] @ x[t - 1 - k]
        x[t] = acc
    return TimeSeries(x[extra:])


def read_series_csv(path):
    """Read a ``T x d`` series; a non-numeric first token marks a header line."""
    rows = []
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise DimensionMismatch(f"{path} holds no data")
    first = lines[0].split(",")[0].strip()
    try:
        float(first)
    except ValueError:
        lines = lines[1:]
    for ln in lines:
        rows.append([float(tok) for tok in ln.split(",")])
    return TimeSeries(np.array(rows))


def write_series_csv(path, ts, header=None):
    with open(path, "w") as fh:
        if header:
            fh.write(",".join(header) + "\n")
        for row in ts.values:
            fh.write(",".join(format(v, ".17g") for v in row) + "\n")


__all__ = [
    "VarModel", "CompanionForm", "TimeSeries", "augment", "is_stationary",
    "stationary_covariance", "lyapunov_residual", "lag1_autocov", "simulate",
    "standard_normals", "read_series_csv", "write_series_csv", "NotPositiveDefinite",
]
