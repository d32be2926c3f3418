import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import linprog

from nashforge.exceptions import DimensionError, NumericalError
from nashforge.numerics.simplex import DenseSimplex, LpStatus, solve_lp


def test_simple_optimum():
    # min -x - y  s.t. x + y <= 4, x <= 3, x, y >= 0
    res = solve_lp([-1.0, -1.0], A_ub=[[1.0, 1.0], [1.0, 0.0]], b_ub=[4.0, 3.0], free=False)
    assert res.status is LpStatus.OPTIMAL
    assert res.objective == pytest.approx(-4.0)


def test_free_variables_take_negative_values():
    res = solve_lp([0.0], A_eq=[[1.0]], b_eq=[-2.5], free=True)
    assert res.feasible
    assert res.x[0] == pytest.approx(-2.5)


def test_infeasible():
    res = solve_lp([0.0], A_ub=[[1.0], [-1.0]], b_ub=[-1.0, -1.0])
    assert res.status is LpStatus.INFEASIBLE
    assert not res.feasible


def test_unbounded():
    res = solve_lp([-1.0], A_ub=[[-1.0]], b_ub=[0.0], free=False)
    assert res.status is LpStatus.UNBOUNDED
    assert res.feasible


def test_redundant_equalities():
    res = solve_lp([1.0, 1.0], A_eq=[[1.0, 1.0], [2.0, 2.0]], b_eq=[1.0, 2.0], free=False)
    assert res.status is LpStatus.OPTIMAL
    assert res.objective == pytest.approx(1.0)


def test_mixed_free_mask():
    res = solve_lp([1.0, 0.0], A_eq=[[1.0, 1.0]], b_eq=[0.0], A_ub=[[0.0, 1.0]], b_ub=[3.0],
                   free=[True, False])
    assert res.status is LpStatus.OPTIMAL
    assert res.x[0] == pytest.approx(-3.0)
    assert res.x[1] >= -1e-12


def test_degenerate_problem_terminates():
    # Classic cycling example for the largest-coefficient rule.
    c = [-0.75, 150.0, -0.02, 6.0]
    A = [[0.25, -60.0, -0.04, 9.0], [0.5, -90.0, -0.02, 3.0], [0.0, 0.0, 1.0, 0.0]]
    res = solve_lp(c, A_ub=A, b_ub=[0.0, 0.0, 1.0], free=False)
    assert res.status is LpStatus.OPTIMAL
    assert res.objective == pytest.approx(-0.05)


def test_iteration_guard():
    solver = DenseSimplex(max_iter=1)
    with pytest.raises(NumericalError):
        solver.solve(np.array([-1.0, -1.0]), np.zeros((0, 2)), np.zeros(0),
                     np.array([[1.0, 0.0], [0.0, 1.0]]), np.array([1.0, 1.0]),
                     np.array([True, True]))


def test_dimension_checks():
    with pytest.raises(DimensionError):
        solve_lp([0.0, 0.0], A_eq=[[1.0]], b_eq=[0.0])
    with pytest.raises(DimensionError):
        solve_lp([0.0], A_ub=[[1.0]], b_ub=[0.0, 1.0])


@given(st.integers(0, 100_000))
def test_agrees_with_scipy(seed):
    rng = np.random.default_rng(seed)
    n, m_eq, m_ub = int(rng.integers(1, 5)), int(rng.integers(0, 3)), int(rng.integers(0, 4))
    c = rng.uniform(-1, 1, n)
    A_eq = rng.uniform(-2, 2, (m_eq, n))
    b_eq = rng.uniform(-2, 2, m_eq)
    A_ub = rng.uniform(-2, 2, (m_ub, n))
    b_ub = rng.uniform(-2, 2, m_ub)
    # Box keeps both solvers bounded.
    A_ub = np.vstack([A_ub, np.eye(n), -np.eye(n)])
    b_ub = np.concatenate([b_ub, np.full(2 * n, 5.0)])

    ours = solve_lp(c, A_eq, b_eq, A_ub, b_ub, free=True)
    ref = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq if m_eq else None,
                  b_eq=b_eq if m_eq else None, bounds=[(None, None)] * n, method="highs")
    assert ours.feasible == (ref.status == 0)
    if ref.status == 0:
        assert ours.objective == pytest.approx(ref.fun, abs=1e-7)
        assert np.all(A_ub @ ours.x <= b_ub + 1e-7)
        if m_eq:
            np.testing.assert_allclose(A_eq @ ours.x, b_eq, atol=1e-7)
