import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from isingcircuits import lp
from isingcircuits.circuit import COPY, XOR
from isingcircuits.constraints import global_min_rows
from isingcircuits.lp import EQ, GE, LE, INFEASIBLE, OPTIMAL, UNBOUNDED, LpError, LpProblem, l1_minimize, solve


def test_textbook_max_problem():
    # max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18, x, y >= 0  -> (2, 6), 36
    p = LpProblem(2, [-3, -5], [([1, 0], LE, 4), ([0, 2], LE, 12), ([3, 2], LE, 18)], [(0, None)] * 2)
    sol = solve(p)
    assert sol.status == OPTIMAL
    assert np.allclose(sol.x, [2, 6])
    assert np.isclose(sol.objective_value, -36)


def test_equality_and_bounds():
    p = LpProblem(2, [1, 1], [([1, -1], EQ, 1)], [(0, 3), (None, 2)])
    sol = solve(p)
    assert sol.optimal
    assert p.max_violation(sol.x) < 1e-9
    # x - y = 1 with y <= 2 and x >= 0: minimum of x + y is at x = 0, y = -1
    assert np.isclose(sol.objective_value, -1)


def test_infeasible_and_unbounded():
    p = LpProblem(1, [0], [([1], GE, 2), ([1], LE, 1)])
    assert solve(p).status == INFEASIBLE
    q = LpProblem(1, [-1], [([1], GE, 0)])
    assert solve(q).status == UNBOUNDED


def test_no_constraints():
    assert solve(LpProblem(2, [1, 1], [], [(0, None), (1, None)])).objective_value == 1


def test_bad_problem_rejected():
    with pytest.raises(LpError):
        LpProblem(2, [1, 1], [([1], GE, 0)])
    with pytest.raises(LpError):
        LpProblem(1, [1], [([1], "<", 0)])


def test_degenerate_cycling_example_terminates():
    # Beale's example cycles under the textbook rule; Bland's rule must finish
    c = [-0.75, 150, -0.02, 6]
    cons = [([0.25, -60, -0.04, 9], LE, 0), ([0.5, -90, -0.02, 3], LE, 0), ([0, 0, 1, 0], LE, 1)]
    sol = solve(LpProblem(4, c, cons, [(0, None)] * 4))
    assert sol.optimal
    assert np.isclose(sol.objective_value, -0.05)


def test_copy_l1_ground_truth():
    sys = global_min_rows(COPY)
    res = l1_minimize(sys.rows, sys.rhs)
    assert abs(res.norm - 0.5) <= 1e-7
    assert np.allclose(res.u, [0, -0.5])


def test_xor_infeasible():
    sys = global_min_rows(XOR)
    assert not l1_minimize(sys.rows, sys.rhs).feasible
    assert not lp.is_feasible(sys.rows, sys.rhs)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(1, 10), st.integers(0, 2**32 - 1))
def test_l1_matches_scipy(p, k, seed):
    rng = np.random.default_rng(seed)
    rows = rng.integers(-2, 3, size=(k, p)).astype(float)
    rhs = rng.integers(-1, 3, size=k).astype(float)
    ours = l1_minimize(rows, rhs)
    # independent route: HiGHS on the same split formulation
    ref = linprog(np.ones(2 * p), A_ub=-np.hstack([rows, -rows]), b_ub=-rhs, bounds=[(0, None)] * (2 * p),
                  method="highs")
    assert ours.feasible == (ref.status == 0)
    assert lp.is_feasible(rows, rhs) == ours.feasible
    if ours.feasible:
        assert abs(ours.norm - ref.fun) <= 1e-7 * (1 + abs(ref.fun))
        assert np.all(rows @ ours.u >= rhs - 1e-9)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_general_solve_matches_scipy(n, k, seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(k, n))
    b = rng.normal(size=k)
    c = rng.normal(size=n)
    p = LpProblem(n, c, [(A[i], LE, b[i]) for i in range(k)], [(-3, 3)] * n)
    ours = solve(p)
    ref = linprog(c, A_ub=A, b_ub=b, bounds=[(-3, 3)] * n, method="highs")
    assert ours.optimal == (ref.status == 0)
    if ours.optimal:
        assert abs(ours.objective_value - ref.fun) <= 1e-7 * (1 + abs(ref.fun))
        assert p.max_violation(ours.x) <= 1e-8
