import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from optquad.discrete_operator import (
    DiscreteKernel,
    build_u_profile,
    d1_at,
    reconstruct_c1,
    rhs_f_closed,
    rhs_g_closed,
    verify_d1_identities,
)
from optquad.errors import DomainError
from optquad.rules import Grid, optimal_rule

STANDARD_N = (1, 2, 3, 5, 10, 25, 50, 100)

# extended-precision values at h = 0.1 and at N = 1
D1_CENTER_H01 = -20.066622264507973
D1_SIDE_H01 = 9.98335275729611
F0_N1 = -0.04816956188191022
BIG_D_N1 = -0.03521477144261934
G_N1 = 0.0518191617571635
G_N100 = 5.267662544140012e-06


def test_frozen_d1_values():
    assert d1_at(0.1, 0) == pytest.approx(D1_CENTER_H01, rel=1e-14)
    assert d1_at(0.1, 1) == pytest.approx(D1_SIDE_H01, rel=1e-14)
    assert d1_at(0.1, -1) == d1_at(0.1, 1)
    assert d1_at(0.1, 2) == 0.0


@given(st.floats(min_value=1e-4, max_value=1.0))
def test_d1_against_extended_precision(h):
    with mpmath.workdps(40):
        hm = mpmath.mpf(h)
        center = 2 * (1 + mpmath.e ** (2 * hm)) / (1 - mpmath.e ** (2 * hm))
        side = -2 * mpmath.e**hm / (1 - mpmath.e ** (2 * hm))
    assert d1_at(h, 0) == pytest.approx(float(center), rel=1e-13)
    assert d1_at(h, 1) == pytest.approx(float(side), rel=1e-13)


@given(st.floats(min_value=1e-3, max_value=1.0))
def test_annihilates_exponentials(h):
    assert DiscreteKernel(h).annihilation_residual() < 1e-14


@pytest.mark.parametrize("h", [1.0, 0.1, 0.01])
def test_identities(h):
    report = verify_d1_identities(h, 50)
    assert report.max_scaled <= 1e-11
    assert report.center_value == pytest.approx(1.0, abs=1e-12)


def test_identity_argument_checks():
    with pytest.raises(ValueError):
        verify_d1_identities(0.1, 1)
    with pytest.raises(DomainError):
        d1_at(0.0, 0)
    with pytest.raises(DomainError):
        DiscreteKernel(1.5)


def test_frozen_rhs_values():
    grid = Grid(1)
    assert rhs_f_closed(grid, 0) == pytest.approx(F0_N1, rel=1e-14)
    assert rhs_g_closed(grid) == pytest.approx(G_N1, rel=1e-14)
    assert build_u_profile(grid).big_d == pytest.approx(BIG_D_N1, rel=1e-14)
    assert rhs_g_closed(Grid(100)) == pytest.approx(G_N100, rel=1e-12)


def test_rhs_vectorized():
    grid = Grid(6)
    vec = rhs_f_closed(grid, np.arange(7))
    np.testing.assert_array_equal(vec, [rhs_f_closed(grid, b) for b in range(7)])


@pytest.mark.parametrize("n", STANDARD_N)
def test_reconstruction_matches_closed_form(n):
    grid = Grid(n)
    np.testing.assert_allclose(reconstruct_c1(grid), optimal_rule(grid).c1, rtol=0, atol=1e-11)


@pytest.mark.parametrize("n", STANDARD_N)
def test_profile_branches_continuous(n):
    assert max(build_u_profile(Grid(n)).branch_residuals()) <= 1e-12


def test_profile_outer_branches_annihilated():
    # D1 kills the exponential branches away from the boundary
    grid = Grid(4)
    u = build_u_profile(grid)
    kernel = DiscreteKernel(grid.h)
    for beta in (-5, -3, 7, 9):
        value = math.fsum(w * u(beta - g) for w, g in zip((kernel.side, kernel.center, kernel.side), (-1, 0, 1)))
        assert abs(value) < 1e-13
