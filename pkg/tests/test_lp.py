import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import column_lp_vertex_oracle, random_column_lp
from scipy.optimize import linprog

from dirvar.errors import DimensionMismatch, NotOptimal
from dirvar.estimators import solve_direct_path
from dirvar.lp import LpSolution, LpStatus, build_column_lp, recover_beta, solve_lp, solve_simplex


def test_build_column_lp_zero_column():
    lp = build_column_lp(np.eye(2), [0.0, 0.0], 0.1)
    np.testing.assert_array_equal(lp.theta, [0.1, 0.1, 0.1, 0.1])
    i = np.eye(2)
    np.testing.assert_array_equal(lp.w, np.block([[-i, i], [i, -i]]))
    assert lp.m == 2


def test_build_column_lp_substitution():
    lp = build_column_lp(np.eye(2), [0.5, 0.0], 0.1)
    np.testing.assert_allclose(lp.theta, [0.6, 0.1, -0.4, 0.1], rtol=0, atol=1e-15)


def test_build_column_lp_block_structure():
    rng = np.random.default_rng(0)
    g = rng.standard_normal((3, 3))
    s = g + g.T
    lp = build_column_lp(s, rng.standard_normal(3), 0.3)
    w = lp.w
    assert np.array_equal(w[:3, :3], -s)
    assert np.array_equal(w[:3, 3:], s)
    assert np.array_equal(w[3:, :3], s)
    assert np.array_equal(w[3:, 3:], -s)


def test_build_column_lp_errors():
    with pytest.raises(DimensionMismatch):
        build_column_lp(np.eye(2), [1.0, 2.0, 3.0], 0.1)
    with pytest.raises(DimensionMismatch):
        build_column_lp(np.ones((2, 3)), [1.0, 2.0], 0.1)
    with pytest.raises(ValueError):
        build_column_lp(np.eye(2), [1.0, 2.0], -0.1)


def test_solve_simplex_zero_is_optimal_when_theta_nonnegative():
    sol = solve_simplex(build_column_lp(np.eye(3), [0.2, -0.3, 0.1], 0.5))
    assert sol.optimal
    assert sol.objective == 0.0
    assert np.array_equal(sol.omega, np.zeros(6))
    assert sol.pivots == 0


def test_solve_lp_general_form():
    # min x1 + x2 s.t. x1 + x2 >= 1
    sol = solve_lp([1.0, 1.0], [[-1.0, -1.0]], [-1.0])
    assert sol.optimal
    assert sol.objective == pytest.approx(1.0, abs=1e-12)


def test_solve_lp_infeasible_and_unbounded():
    # x1 <= -1 with x1 >= 0
    assert solve_lp([1.0], [[1.0]], [-1.0]).status is LpStatus.INFEASIBLE
    # min -x1 with x1 free above
    assert solve_lp([-1.0, 0.0], [[0.0, 1.0]], [1.0]).status is LpStatus.UNBOUNDED


def test_solve_lp_matches_highs_on_random_programs():
    rng = np.random.default_rng(5)
    seen = {LpStatus.OPTIMAL: 0, LpStatus.INFEASIBLE: 0}
    for _ in range(150):
        m, n = int(rng.integers(1, 8)), int(rng.integers(1, 8))
        a = rng.standard_normal((m, n))
        b = rng.standard_normal(m)
        c = rng.uniform(0.1, 2.0, n)
        ref = linprog(c, A_ub=a, b_ub=b, bounds=(0, None), method="highs")
        sol = solve_lp(c, a, b)
        if ref.status == 2:
            assert sol.status is LpStatus.INFEASIBLE
        else:
            assert ref.status == 0
            assert sol.optimal
            assert sol.objective == pytest.approx(ref.fun, abs=1e-8)
            assert np.all(a @ sol.omega <= b + 1e-9)
        seen[sol.status] = seen.get(sol.status, 0) + 1
    assert seen[LpStatus.OPTIMAL] > 20 and seen[LpStatus.INFEASIBLE] > 5


def test_column_lps_match_vertex_oracle():
    rng = np.random.default_rng(11)
    n_optimal = 0
    for _ in range(120):
        s, r, lam = random_column_lp(rng)
        ref, _ = column_lp_vertex_oracle(s, r, lam)
        lp = build_column_lp(s, r, lam)
        sol = solve_simplex(lp)
        if ref is None:
            assert sol.status is LpStatus.INFEASIBLE
            continue
        n_optimal += 1
        assert sol.optimal
        assert sol.objective == pytest.approx(ref, abs=1e-8)
        assert sol.objective == float(np.sum(sol.omega))
        assert np.all(sol.omega >= 0)
        assert np.all(lp.theta + lp.w @ sol.omega >= -1e-9)
        v = recover_beta(sol, lp.m)
        assert np.max(np.abs(s @ v - r)) <= lam + 1e-9
    assert n_optimal > 80


def test_warm_path_matches_vertex_oracle():
    rng = np.random.default_rng(12)
    for _ in range(60):
        s, r, _ = random_column_lp(rng)
        lams = rng.uniform(0.01, 1.0, 5)
        betas, statuses, _ = solve_direct_path(s, r[:, None], lams)
        for lam, beta, stat in zip(lams, betas, statuses):
            ref, _ = column_lp_vertex_oracle(s, r, lam)
            if ref is None:
                assert stat[0] is LpStatus.INFEASIBLE
            else:
                assert stat[0] is LpStatus.OPTIMAL
                assert np.sum(np.abs(beta[:, 0])) == pytest.approx(ref, abs=1e-8)
                assert np.max(np.abs(s @ beta[:, 0] - r)) <= lam + 1e-9


def test_complementarity_of_optimal_omega():
    rng = np.random.default_rng(13)
    for _ in range(100):
        s, r, lam = random_column_lp(rng)
        lp = build_column_lp(s, r, lam)
        sol = solve_simplex(lp)
        if sol.optimal:
            w = sol.omega
            assert np.all(np.maximum(w[:lp.m], w[lp.m:]) * np.minimum(w[:lp.m], w[lp.m:]) <= 1e-12)


def test_objective_monotone_in_lambda():
    rng = np.random.default_rng(14)
    for _ in range(50):
        s, r, _ = random_column_lp(rng)
        objs = []
        for lam in (0.05, 0.1, 0.2, 0.4, 0.8):
            sol = solve_simplex(build_column_lp(s, r, lam))
            objs.append(sol.objective if sol.optimal else np.inf)
        assert all(b <= a + 1e-10 for a, b in zip(objs, objs[1:]))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_solve_simplex_deterministic(seed):
    s, r, lam = random_column_lp(np.random.default_rng(seed))
    a = solve_simplex(build_column_lp(s, r, lam))
    b = solve_simplex(build_column_lp(s, r, lam))
    assert a.status is b.status
    assert np.array_equal(a.omega, b.omega)
    assert a.pivots == b.pivots


def test_recover_beta():
    zero = LpSolution(np.zeros(4), 0.0, LpStatus.OPTIMAL, 0)
    np.testing.assert_array_equal(recover_beta(zero, 2), [0.0, 0.0])
    sol = LpSolution(np.array([1.0, 0.0, 0.0, 2.0]), 3.0, LpStatus.OPTIMAL, 2)
    np.testing.assert_array_equal(recover_beta(sol, 2), [1.0, -2.0])
    with pytest.raises(NotOptimal):
        recover_beta(LpSolution(np.zeros(4), 0.0, LpStatus.INFEASIBLE, 3), 2)
    with pytest.raises(DimensionMismatch):
        recover_beta(sol, 3)
