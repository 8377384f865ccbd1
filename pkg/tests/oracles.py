"""Independent reference implementations used only by the tests."""

from itertools import combinations

import numpy as np


def column_lp_vertex_oracle(s, r, lam, tol=1e-9):
    """Brute-force ``min |v|_1 s.t. |s v - r|_inf <= lam``.

    The objective is linear on each orthant, and every orthant cell of the
    feasible set is pointed, so an optimum sits where ``m`` independent
    hyperplanes among ``v_i = 0`` and ``s_i v = r_i +- lam`` meet.  All such
    intersections are enumerated.  Returns ``(objective, v)`` or
    ``(None, None)`` when no feasible vertex exists.
    """
    m = s.shape[0]
    rows = np.vstack([np.eye(m), s, s])
    rhs = np.concatenate([np.zeros(m), r + lam, r - lam])
    combos = np.array(list(combinations(range(3 * m), m)))
    a = rows[combos]
    b = rhs[combos]
    det = np.linalg.det(a)
    ok = np.abs(det) > 1e-10 * np.max(np.abs(a), axis=(1, 2)) ** m
    if not ok.any():
        return None, None
    v = np.linalg.solve(a[ok], b[ok][..., None])[..., 0]
    scale = max(1.0, np.max(np.abs(rhs)))
    resid = np.max(np.abs(v @ s.T - r), axis=1)
    feas = resid <= lam + tol * scale
    if not feas.any():
        return None, None
    obj = np.sum(np.abs(v[feas]), axis=1)
    i = int(np.argmin(obj))
    return float(obj[i]), v[feas][i]


def random_column_lp(rng, m=None):
    """Random ``(s, r, lam)`` with ``s`` a sample covariance, often singular."""
    if m is None:
        m = int(rng.integers(1, 7))
    n = int(rng.integers(1, 2 * m + 3))
    x = rng.standard_normal((n, m))
    s = x.T @ x / n
    r = rng.standard_normal(m) * 0.5
    lam = float(rng.uniform(0.01, 0.8))
    return s, r, lam


def normal_equations(z, y):
    """Least squares through ``z'z b = z'y`` with numpy's dense solver."""
    return np.linalg.solve(z.T @ z, z.T @ y)


def random_stable_model(rng, d, p, radius=0.9):
    """Random VAR(p) with companion spectral radius ``radius`` and SPD noise."""
    from dirvar.varproc import VarModel, augment

    lags = [rng.standard_normal((d, d)) for _ in range(p)]
    comp = augment(VarModel(tuple(lags), np.eye(d))).a_tilde
    rho = np.max(np.abs(np.linalg.eigvals(comp)))
    # scaling A_k by c**k scales the companion eigenvalues by c
    c = radius / rho
    lags = [a * c ** (k + 1) for k, a in enumerate(lags)]
    g = rng.standard_normal((d, d))
    psi = g @ g.T / d + 0.5 * np.eye(d)
    return VarModel(tuple(lags), 0.5 * (psi + psi.T))
