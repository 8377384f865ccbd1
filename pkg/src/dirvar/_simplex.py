"""Compiled dense-tableau simplex kernels.

:func:`two_phase` is a general two-phase primal simplex for::

    minimize    c @ x
    subject to  A @ x <= b,  x >= 0

Rows with ``b_i < 0`` are negated and receive an artificial variable; phase 1
drives the artificials to zero, phase 2 optimizes ``c``.  Artificial columns
are never stored: once an artificial leaves the basis it cannot re-enter, so
only the basis bookkeeping needs to know about it.

Pricing is Dantzig's rule (most negative reduced cost, lowest index on ties).
The ratio test breaks ties by the lowest basic-variable label, preferring
artificials.  After a run of consecutive degenerate pivots the kernel falls
back to Bland's rule for both choices until the objective moves again, which
rules out cycling.

:func:`dual_path` specializes to the column LPs of the direct estimator,
where only the bound vector depends on ``lambda0``.  Their costs are all
positive, so the slack basis is dual feasible for every ``lambda0`` and the
dual simplex needs no phase 1.  Solving a decreasing sequence of ``lambda0``
values warm-starts each solve from the previous optimal basis.
"""

import numpy as np
from numba import njit

OPTIMAL = 0
INFEASIBLE = 1
UNBOUNDED = 2
ITERATION_LIMIT = 3

# consecutive degenerate pivots tolerated before switching to Bland's rule
DEGENERATE_RUN = 16


@njit(cache=True, nogil=True)
def _pivot(tab, z, r, c):
    # the pivot row is copied out so the row updates below do not alias it
    m, ncol = tab.shape
    piv = tab[r, c]
    row = np.empty(ncol)
    for j in range(ncol):
        row[j] = tab[r, j] / piv
    for j in range(ncol):
        tab[r, j] = row[j]
    for i in range(m):
        if i == r:
            continue
        f = tab[i, c]
        if f != 0.0:
            for j in range(ncol):
                tab[i, j] -= f * row[j]
            tab[i, c] = 0.0
    f = z[c]
    if f != 0.0:
        for j in range(ncol):
            z[j] -= f * row[j]
        z[c] = 0.0


@njit(cache=True, nogil=True)
def _iterate(tab, z, basis, n_enter, n_real, tol, max_pivots, pivots):
    """Primal simplex iterations on a feasible tableau.

    Only columns ``< n_enter`` may enter.  Basic labels ``>= n_real`` are
    artificials.  Returns ``(status, pivots)``.
    """
    m, ncol = tab.shape
    rhs = ncol - 1
    run = 0
    bland = False
    while pivots < max_pivots:
        enter = -1
        if bland:
            for j in range(n_enter):
                if z[j] < -tol:
                    enter = j
                    break
        else:
            best = -tol
            for j in range(n_enter):
                if z[j] < best:
                    best = z[j]
                    enter = j
        if enter < 0:
            return OPTIMAL, pivots

        leave = -1
        best_ratio = np.inf
        best_key = 0
        for i in range(m):
            a = tab[i, enter]
            if a > tol:
                ratio = tab[i, rhs] / a
                key = basis[i] if basis[i] < n_real else -1
                if leave < 0 or ratio < best_ratio - 1e-13:
                    leave = i
                    best_ratio = ratio
                    best_key = key
                elif ratio <= best_ratio + 1e-13 and key < best_key:
                    leave = i
                    best_key = key
                    if ratio < best_ratio:
                        best_ratio = ratio
        if leave < 0:
            return UNBOUNDED, pivots

        if best_ratio <= tol:
            run += 1
            if run > DEGENERATE_RUN:
                bland = True
        else:
            run = 0
            bland = False

        _pivot(tab, z, leave, enter)
        basis[leave] = enter
        pivots += 1
    return ITERATION_LIMIT, pivots


@njit(cache=True, nogil=True)
def two_phase(c, a, b, tol, feas_tol, max_pivots):
    """Solve ``min c@x s.t. a@x <= b, x >= 0``.

    Returns ``(status, x, objective, pivots)``.
    """
    m, n = a.shape
    n_real = n + m
    tab = np.zeros((m, n_real + 1))
    basis = np.empty(m, dtype=np.int64)
    n_art = 0
    for i in range(m):
        sgn = 1.0
        if b[i] < 0.0:
            sgn = -1.0
        for j in range(n):
            tab[i, j] = sgn * a[i, j]
        tab[i, n + i] = sgn
        tab[i, n_real] = sgn * b[i]
        if sgn < 0.0:
            basis[i] = n_real + n_art
            n_art += 1
        else:
            basis[i] = n + i

    pivots = 0
    z = np.zeros(n_real + 1)
    if n_art > 0:
        for i in range(m):
            if basis[i] >= n_real:
                for j in range(n_real + 1):
                    z[j] -= tab[i, j]
        status, pivots = _iterate(tab, z, basis, n_real, n_real, tol,
                                  max_pivots, pivots)
        if status == ITERATION_LIMIT:
            return status, np.zeros(n), 0.0, pivots
        # z[-1] holds minus the phase-1 objective
        scale = 1.0
        for i in range(m):
            scale = max(scale, abs(b[i]))
        if -z[n_real] > feas_tol * scale:
            return INFEASIBLE, np.zeros(n), 0.0, pivots
        # artificials left in the basis sit at zero level; swap them out
        for i in range(m):
            if basis[i] >= n_real:
                best = tol
                col = -1
                for j in range(n_real):
                    v = abs(tab[i, j])
                    if v > best:
                        best = v
                        col = j
                if col >= 0:
                    _pivot(tab, z, i, col)
                    basis[i] = col
                    pivots += 1
                else:
                    # redundant row
                    for j in range(n_real + 1):
                        tab[i, j] = 0.0

    z[:] = 0.0
    for j in range(n):
        z[j] = c[j]
    for i in range(m):
        k = basis[i]
        if k < n:
            ck = c[k]
            if ck != 0.0:
                for j in range(n_real + 1):
                    z[j] -= ck * tab[i, j]
    for i in range(m):
        k = basis[i]
        if k < n_real:
            z[k] = 0.0
    status, pivots = _iterate(tab, z, basis, n_real, n_real, tol,
                              max_pivots, pivots)
    x = np.zeros(n)
    if status != OPTIMAL:
        return status, x, 0.0, pivots
    for i in range(m):
        k = basis[i]
        if k < n:
            v = tab[i, n_real]
            x[k] = v if v > 0.0 else 0.0
    obj = 0.0
    for j in range(n):
        obj += c[j] * x[j]
    return OPTIMAL, x, obj, pivots


@njit(cache=True, nogil=True)
def solve_columns(s, rhs_cols, lambda0, tol, feas_tol, max_pivots):
    """Solve the column LPs ``min |v|_1 s.t. |s@v - r|_inf <= lambda0``.

    ``rhs_cols`` holds one right-hand side ``r`` per column.  The constraint
    matrix ``[[s, -s], [-s, s]]`` is shared, only the bound vector changes.
    Returns ``(statuses, omegas, pivots)`` with ``omegas`` of shape
    ``(2m, ncols)``.
    """
    m = s.shape[0]
    ncols = rhs_cols.shape[1]
    a = np.empty((2 * m, 2 * m))
    for i in range(m):
        for j in range(m):
            v = s[i, j]
            a[i, j] = v
            a[i, m + j] = -v
            a[m + i, j] = -v
            a[m + i, m + j] = v
    c = np.ones(2 * m)
    b = np.empty(2 * m)
    statuses = np.empty(ncols, dtype=np.int64)
    pivots = np.empty(ncols, dtype=np.int64)
    omegas = np.zeros((2 * m, ncols))
    for k in range(ncols):
        for i in range(m):
            b[i] = rhs_cols[i, k] + lambda0
            b[m + i] = -rhs_cols[i, k] + lambda0
        st, x, obj, piv = two_phase(c, a, b, tol, feas_tol, max_pivots)
        statuses[k] = st
        pivots[k] = piv
        for i in range(2 * m):
            omegas[i, k] = x[i]
    return statuses, omegas, pivots


@njit(cache=True, nogil=True)
def _dual_iterate(tab, z, basis, tol, feas_tol, max_pivots, pivots):
    """Dual simplex iterations on a dual-feasible tableau.

    Returns ``(status, pivots)``; ``INFEASIBLE`` means the primal has no
    feasible point.
    """
    m, ncol = tab.shape
    rhs = ncol - 1
    n_real = rhs
    run = 0
    bland = False
    while pivots < max_pivots:
        leave = -1
        if bland:
            best_key = n_real
            for i in range(m):
                if tab[i, rhs] < -feas_tol and basis[i] < best_key:
                    best_key = basis[i]
                    leave = i
        else:
            worst = -feas_tol
            for i in range(m):
                if tab[i, rhs] < worst:
                    worst = tab[i, rhs]
                    leave = i
        if leave < 0:
            return OPTIMAL, pivots

        enter = -1
        best_ratio = np.inf
        for j in range(n_real):
            a = tab[leave, j]
            if a < -tol:
                ratio = z[j] / -a
                if ratio < best_ratio - 1e-13:
                    best_ratio = ratio
                    enter = j
        if enter < 0:
            return INFEASIBLE, pivots

        if best_ratio <= tol:
            run += 1
            if run > DEGENERATE_RUN:
                bland = True
        else:
            run = 0
            bland = False

        _pivot(tab, z, leave, enter)
        basis[leave] = enter
        pivots += 1
    return ITERATION_LIMIT, pivots


@njit(cache=True, nogil=True)
def dual_path(s, rhs_cols, lambdas, tol, feas_tol, max_pivots):
    """Column LPs ``min |v|_1 s.t. |s@v - r|_inf <= lam`` along a path of ``lam``.

    ``lambdas`` must be non-increasing.  For each column the tableau starts
    from the slack basis at ``lambdas[0]``; every later value reuses the
    previous optimal basis and only recomputes the basic values.  Once a
    value is infeasible all smaller ones are too, so they are marked
    infeasible without work.

    Returns ``(statuses, omegas, pivots)`` of shapes ``(nl, ncols)``,
    ``(nl, 2m, ncols)`` and ``(nl, ncols)``.
    """
    m = s.shape[0]
    n = 2 * m
    ncols = rhs_cols.shape[1]
    nl = lambdas.shape[0]
    statuses = np.full((nl, ncols), INFEASIBLE, dtype=np.int64)
    omegas = np.zeros((nl, n, ncols))
    pivots = np.zeros((nl, ncols), dtype=np.int64)
    n_real = 2 * n
    tab = np.empty((n, n_real + 1))
    z = np.empty(n_real + 1)
    basis = np.empty(n, dtype=np.int64)
    b = np.empty(n)
    binv_b = np.empty(n)
    for k in range(ncols):
        tab[:, :] = 0.0
        for i in range(m):
            for j in range(m):
                v = s[i, j]
                tab[i, j] = v
                tab[i, m + j] = -v
                tab[m + i, j] = -v
                tab[m + i, m + j] = v
        for i in range(n):
            tab[i, n + i] = 1.0
            basis[i] = n + i
        z[:] = 0.0
        for j in range(n):
            z[j] = 1.0
        for q in range(nl):
            lam = lambdas[q]
            scale = 1.0
            for i in range(m):
                b[i] = rhs_cols[i, k] + lam
                b[m + i] = -rhs_cols[i, k] + lam
                scale = max(scale, abs(b[i]), abs(b[m + i]))
            # basic values B^-1 b; B^-1 sits in the slack block
            for i in range(n):
                acc = 0.0
                for j in range(n):
                    acc += tab[i, n + j] * b[j]
                binv_b[i] = acc
            for i in range(n):
                tab[i, n_real] = binv_b[i]
            obj = 0.0
            for i in range(n):
                if basis[i] < n:
                    obj += binv_b[i]
            z[n_real] = -obj
            st, piv = _dual_iterate(tab, z, basis, tol, feas_tol * scale, max_pivots, 0)
            pivots[q, k] = piv
            statuses[q, k] = st
            if st != OPTIMAL:
                break
            for i in range(n):
                kk = basis[i]
                if kk < n:
                    v = tab[i, n_real]
                    omegas[q, kk, k] = v if v > 0.0 else 0.0
    return statuses, omegas, pivots
