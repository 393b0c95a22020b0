import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from optquad.error_norm import (
    constraint_residuals,
    em_norm_sq,
    eval_extremal_derivative,
    eval_extremal_function,
    extremal_asymmetry,
    functional_value,
    norm_sq_bruteforce,
    norm_sq_closed,
    norm_sq_series,
    w21_seminorm,
)
from optquad.errors import ConstraintError, DomainError
from optquad.rules import INTEGRANDS, Grid, build_rule, optimal_rule

# 1 - h/2 + h^2/12 - h/(e^h - 1) at 40 digits
NORM_H1 = 0.001356626464006909
NORM_H01 = 1.3885582837092874e-07
BREAKDOWN_N1 = (-0.007897564108834467, 0.043800298410950365, 0.02154031740762189, 0.00853452697713479)
SEMINORM_XSQ = 3.055050463303893


def _closed_mp(h):
    with mpmath.workdps(50):
        h = mpmath.mpf(h)
        return float(1 - h / 2 + h * h / 12 - h / mpmath.expm1(h))


def test_frozen_values():
    assert norm_sq_closed(1.0) == pytest.approx(NORM_H1, rel=1e-14)
    assert norm_sq_closed(0.1) == pytest.approx(NORM_H01, rel=1e-14)
    b = norm_sq_bruteforce(optimal_rule(Grid(1)))
    for got, want in zip((b.a1, b.a2, b.a3, b.a4), BREAKDOWN_N1):
        assert got == pytest.approx(want, rel=1e-13)
    assert b.assembled == pytest.approx(b.total, rel=1e-12)


@given(st.floats(min_value=1e-3, max_value=1.0))
def test_closed_against_extended_precision(h):
    assert norm_sq_closed(h) == pytest.approx(_closed_mp(h), rel=1e-13)


@given(st.floats(min_value=1e-3, max_value=1.0))
def test_series_matches_closed(h):
    assert norm_sq_series(h, 1e-16) == pytest.approx(norm_sq_closed(h), rel=1e-13)


@pytest.mark.parametrize("n", [1, 2, 3, 5, 10, 50, 100])
def test_bruteforce_matches_closed(n):
    assert norm_sq_bruteforce(optimal_rule(Grid(n))).total == pytest.approx(norm_sq_closed(1.0 / n), rel=1e-12)


def test_bruteforce_requires_constraints():
    with pytest.raises(ConstraintError) as info:
        norm_sq_bruteforce(build_rule("euler-maclaurin", 4))
    assert set(info.value.residuals) == {"constant", "exp_minus"}


def test_optimal_beats_euler_maclaurin_comparator():
    for h in (1.0, 0.5, 0.1, 0.01):
        assert 0.9 < norm_sq_closed(h) / em_norm_sq(h) < 1.0


def test_series_tolerance_is_relative():
    h = 0.01
    coarse = norm_sq_series(h, 1e-3)
    assert coarse == pytest.approx(h**4 / 720, rel=1e-15)
    assert norm_sq_series(h, 1e-16) == pytest.approx(norm_sq_closed(h), rel=1e-15)


def test_step_domain():
    for bad in (0.0, -0.1, 1.5):
        with pytest.raises(DomainError):
            norm_sq_closed(bad)


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=1, max_value=12), st.integers(min_value=0, max_value=2**32 - 1))
def test_perturbation_never_helps(n, seed):
    base = optimal_rule(Grid(n))
    ref = norm_sq_bruteforce(base).total
    rng = np.random.default_rng(seed)
    e = np.exp(-base.grid.nodes)
    delta = rng.standard_normal(n + 1)
    delta -= (delta @ e) / (e @ e) * e
    delta *= 1e-3 / np.max(np.abs(delta))
    perturbed = base.with_c1(base.c1 + delta)
    assert abs(constraint_residuals(perturbed)["exp_minus"]) < 1e-15
    assert norm_sq_bruteforce(perturbed).total >= ref - 1e-12


def _node_aligned_integral(rule, fn, points=20):
    gl, gw = np.polynomial.legendre.leggauss(points)
    total = []
    for a, b in zip(rule.grid.nodes[:-1], rule.grid.nodes[1:]):
        x = 0.5 * (a + b) + 0.5 * (b - a) * gl
        total.extend(0.5 * (b - a) * gw * fn(x))
    return math.fsum(total)


@pytest.mark.parametrize("n", [1, 2])
def test_extremal_function_attains_norm(n):
    rule = optimal_rule(Grid(n))
    psi = lambda x: eval_extremal_function(rule, x)
    dpsi = lambda x: eval_extremal_derivative(rule, x)
    value = functional_value(rule, psi, dpsi, _node_aligned_integral(rule, psi))
    assert value == pytest.approx(norm_sq_closed(rule.h), rel=1e-9)


def test_extremal_derivative_consistent():
    rule = optimal_rule(Grid(3))
    x = np.linspace(0.05, 0.95, 7)
    fd = (eval_extremal_function(rule, x + 1e-6) - eval_extremal_function(rule, x - 1e-6)) / 2e-6
    np.testing.assert_allclose(fd, eval_extremal_derivative(rule, x), atol=1e-9)


def test_extremal_asymmetry_is_small():
    assert extremal_asymmetry(optimal_rule(Grid(4))) < 1e-12


def test_extremal_domain():
    with pytest.raises(DomainError):
        eval_extremal_function(optimal_rule(Grid(2)), 1.5)


@given(st.floats(min_value=-5, max_value=5), st.floats(min_value=-5, max_value=5), st.integers(1, 30))
def test_functional_ignores_constant_and_decaying_exponential(a, b, n):
    rule = optimal_rule(Grid(n))
    spec = INTEGRANDS["sinpix"]
    base = functional_value(rule, spec.f, spec.f_prime, spec.exact_integral)
    shifted = functional_value(
        rule,
        lambda x: spec.f(x) + a + b * np.exp(-x),
        lambda x: spec.f_prime(x) - b * np.exp(-x),
        spec.exact_integral + a + b * (-math.expm1(-1.0)),
    )
    assert shifted == pytest.approx(base, abs=1e-13)


def test_seminorm_xsq():
    assert w21_seminorm(INTEGRANDS["xsq"]) == pytest.approx(SEMINORM_XSQ, rel=1e-13)
    assert w21_seminorm(INTEGRANDS["expm"]) == pytest.approx(0.0, abs=1e-15)
    assert w21_seminorm(INTEGRANDS["one"]) == 0.0


def test_seminorm_against_mpmath():
    with mpmath.workdps(30):
        ref = mpmath.sqrt(mpmath.quad(lambda x: (2 / (1 + x) ** 3 - 1 / (1 + x) ** 2) ** 2, [0, 1]))
    assert w21_seminorm(INTEGRANDS["recip1p"]) == pytest.approx(float(ref), rel=1e-13)


def test_seminorm_rejects_bad_second_derivative():
    with pytest.raises(ValueError):
        w21_seminorm(INTEGRANDS["xsq"], second_derivative=lambda x: np.zeros_like(x))
