"""Column linear programs of the direct estimator and their simplex solver.

For one response column ``j`` the estimator solves::

    minimize ||v||_1  subject to  ||S v - s1_j||_inf <= lambda0

Splitting ``v = v_plus - v_minus`` turns this into the standard form::

    minimize 1' omega  subject to  theta + W omega >= 0,  omega >= 0

with ``omega = (v_plus, v_minus)``, ``theta = (s1_j + lambda0, -s1_j + lambda0)``
and ``W = [[-S, S], [S, -S]]``.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _simplex
from .errors import DimensionMismatch, NotOptimal, Unbounded
from .linalg import as_matrix

PIVOT_TOL = 1e-9
FEASIBILITY_TOL = 1e-9
MAX_PIVOTS = 1_000_000


class LpStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


_STATUS = {
    _simplex.OPTIMAL: LpStatus.OPTIMAL,
    _simplex.INFEASIBLE: LpStatus.INFEASIBLE,
    _simplex.UNBOUNDED: LpStatus.UNBOUNDED,
}


@dataclass(frozen=True)
class ColumnLp:
    theta: np.ndarray
    w: np.ndarray
    m: int


@dataclass(frozen=True)
class LpSolution:
    omega: np.ndarray
    objective: float
    status: LpStatus
    pivots: int

    @property
    def optimal(self):
        return self.status is LpStatus.OPTIMAL


def build_column_lp(s, s1_col, lambda0):
    """Assemble ``(theta, W)`` for one column of the direct estimator."""
    s = as_matrix(s, "s")
    s1_col = np.asarray(s1_col, dtype=float).ravel()
    m = s.shape[0]
    if s.shape[1] != m:
        raise DimensionMismatch(f"s must be square, got {s.shape}")
    if s1_col.shape[0] != m:
        raise DimensionMismatch(f"s1_col has length {s1_col.shape[0]}, expected {m}")
    if lambda0 < 0:
        raise ValueError("lambda0 must be nonnegative")
    theta = np.concatenate([s1_col + lambda0, -s1_col + lambda0])
    w = np.block([[-s, s], [s, -s]])
    return ColumnLp(theta=theta, w=w, m=m)


def solve_lp(c, a_ub, b_ub, *, tol=PIVOT_TOL, feas_tol=FEASIBILITY_TOL, max_pivots=MAX_PIVOTS):
    """Two-phase simplex for ``min c@x  s.t.  a_ub@x <= b_ub,  x >= 0``.

    Returns an :class:`LpSolution` whose ``omega`` field holds ``x``.
    Infeasible and unbounded problems are reported through ``status``.
    """
    c = np.ascontiguousarray(c, dtype=float).ravel()
    a = np.ascontiguousarray(np.atleast_2d(np.asarray(a_ub, dtype=float)))
    b = np.ascontiguousarray(b_ub, dtype=float).ravel()
    if a.shape != (b.shape[0], c.shape[0]):
        raise DimensionMismatch(f"a_ub has shape {a.shape}, expected {(b.shape[0], c.shape[0])}")
    code, x, obj, pivots = _simplex.two_phase(c, a, b, tol, feas_tol, max_pivots)
    if code == _simplex.ITERATION_LIMIT:
        raise RuntimeError(f"simplex hit the pivot cap ({max_pivots})")
    return LpSolution(omega=x, objective=float(obj), status=_STATUS[code], pivots=int(pivots))


def solve_simplex(lp):
    """Solve a :class:`ColumnLp`; infeasibility is returned, not raised."""
    n = 2 * lp.m
    sol = solve_lp(np.ones(n), -lp.w, lp.theta)
    if sol.status is LpStatus.UNBOUNDED:
        # the objective is bounded below by zero, so this means a broken tableau
        raise Unbounded("column LP reported unbounded")
    if sol.optimal:
        # objective is defined as the plain sum of the clamped iterate
        return LpSolution(sol.omega, float(np.sum(sol.omega)), sol.status, sol.pivots)
    return sol


def recover_beta(sol, m):
    """``v = omega[:m] - omega[m:]`` from an optimal solution."""
    if sol.status is not LpStatus.OPTIMAL:
        raise NotOptimal(f"solution status is {sol.status.value}")
    omega = np.asarray(sol.omega, dtype=float)
    if omega.shape[0] != 2 * m:
        raise DimensionMismatch(f"omega has length {omega.shape[0]}, expected {2 * m}")
    return omega[:m] - omega[m:]
