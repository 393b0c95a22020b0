from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from optquad.bernoulli import BERNOULLI, BernoulliTable, exp_bracket, exp_bracket_direct, exp_bracket_series


def test_known_values():
    assert BERNOULLI[0] == 1
    assert BERNOULLI[1] == Fraction(-1, 2)
    assert BERNOULLI[2] == Fraction(1, 6)
    assert BERNOULLI[4] == Fraction(-1, 30)
    assert BERNOULLI[6] == Fraction(1, 42)
    assert BERNOULLI[12] == Fraction(-691, 2730)


def test_odd_entries_vanish():
    assert all(BERNOULLI[k] == 0 for k in range(3, BERNOULLI.nmax + 1, 2))


def test_matches_mpmath():
    for k in range(0, BERNOULLI.nmax + 1, 2):
        assert float(BERNOULLI[k]) == pytest.approx(float(mpmath.bernoulli(k)), rel=1e-15)


def test_scaled_is_bn_over_factorial():
    assert BERNOULLI.scaled(4) == pytest.approx(-1.0 / 720.0, rel=1e-15)
    assert BERNOULLI.scaled(6) == pytest.approx(1.0 / 30240.0, rel=1e-15)


def test_small_table_rejects_out_of_range():
    table = BernoulliTable(10)
    with pytest.raises((IndexError, KeyError)):
        table[11]


def _bracket_mp(h):
    with mpmath.workdps(40):
        h = mpmath.mpf(h)
        return float(h * (mpmath.e**h + 1) / mpmath.expm1(h) - 2)


@given(st.floats(min_value=1e-6, max_value=1.0))
def test_bracket_against_extended_precision(h):
    assert exp_bracket(h) == pytest.approx(_bracket_mp(h), rel=1e-13)


@pytest.mark.parametrize("h", [0.05, 0.08, 0.1, 0.15, 0.2])
def test_bracket_branches_agree_near_switch(h):
    assert exp_bracket_series(h) == pytest.approx(exp_bracket_direct(h), rel=1e-12)


def test_bracket_rejects_non_positive_step():
    with pytest.raises(ValueError):
        exp_bracket(0.0)
