import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from optquad.errors import SingularSystemError
from optquad.rules import Grid, optimal_rule
from optquad.system_oracle import (
    assemble_system,
    gauss_solve,
    rhs_f_direct,
    rhs_g_direct,
    solve_oracle,
)
from optquad.discrete_operator import rhs_f_closed, rhs_g_closed

STANDARD_N = (1, 2, 3, 5, 10, 25, 50, 100)


@pytest.mark.parametrize("n", STANDARD_N)
def test_oracle_matches_closed_form(n):
    sol = solve_oracle(Grid(n))
    np.testing.assert_allclose(sol.c1, optimal_rule(Grid(n)).c1, rtol=0, atol=1e-10)
    assert abs(sol.d) <= 1e-10
    assert sol.residual_norm <= 1e-12


@pytest.mark.parametrize("n", (1, 4, 17))
def test_direct_and_closed_rhs_agree(n):
    grid = Grid(n)
    for beta in range(n + 1):
        assert rhs_f_direct(grid, beta) == pytest.approx(rhs_f_closed(grid, beta), abs=1e-14)
    assert rhs_g_direct(grid) == pytest.approx(rhs_g_closed(grid), abs=1e-15)
    a = solve_oracle(grid, "direct")
    b = solve_oracle(grid, "closed")
    np.testing.assert_allclose(a.c1, b.c1, rtol=0, atol=1e-13)


def test_system_shape_and_structure():
    system = assemble_system(Grid(4))
    assert system.dimension == 6
    m = system.matrix
    assert m[-1, -1] == 0.0
    np.testing.assert_array_equal(m[:-1, -1], m[-1, :-1])
    np.testing.assert_array_equal(m[:-1, :-1], m[:-1, :-1].T)
    with pytest.raises(ValueError):
        assemble_system(Grid(2), rhs="sideways")


def test_rhs_direct_index_check():
    with pytest.raises(IndexError):
        rhs_f_direct(Grid(3), 4)


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=1, max_value=12), st.integers(min_value=0, max_value=2**32 - 1))
def test_gauss_solve_against_numpy(size, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((size, size)) + size * np.eye(size)
    b = rng.standard_normal(size)
    x, growth = gauss_solve(a, b)
    np.testing.assert_allclose(x, np.linalg.solve(a, b), rtol=1e-9, atol=1e-12)
    assert growth >= 1.0


def test_gauss_solve_detects_singular():
    with pytest.raises(SingularSystemError):
        gauss_solve(np.array([[1.0, 2.0], [2.0, 4.0]]), np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        gauss_solve(np.eye(2), np.ones(3))


def test_oracle_size_cap():
    with pytest.raises(ValueError):
        solve_oracle(Grid(5001))
