"""Quadrature rules on the uniform grid ``h*beta``, ``beta = 0..N``.

A rule approximates ``int_0^1 f`` by
``sum_beta c0[beta] f(h beta) + c1[beta] f'(h beta)``. The value weights are
always the trapezoid weights; the rules differ only in the first-derivative
weights, which are nonzero at the two endpoints only:

* ``trapezoid``        -- ``c1 = 0``
* ``euler-maclaurin``  -- ``c1[0] = -c1[N] = h^2/12``
* ``optimal``          -- ``c1[0] = -c1[N] = h (e^h + 1) / (2 (e^h - 1)) - 1``,
  which is exact on ``span{1, x, e^x, e^-x}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .bernoulli import exp_bracket, exp_bracket_direct, exp_bracket_series

__all__ = [
    "Grid",
    "QuadratureRule",
    "IntegrandSpec",
    "RULE_NAMES",
    "INTEGRANDS",
    "trapezoid_weights",
    "optimal_derivative_weights",
    "optimal_endpoint_weight",
    "trapezoid_rule",
    "optimal_rule",
    "euler_maclaurin_rule",
    "build_rule",
    "apply_rule",
    "quadrature_error",
    "get_integrand",
]

RULE_NAMES = ("optimal", "euler-maclaurin", "trapezoid")

_ENDPOINT_SERIES_THRESHOLD = 0.1


@dataclass(frozen=True)
class Grid:
    """Uniform grid with ``n`` subintervals of ``[0, 1]``."""

    n: int

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise ValueError(f"grid size must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def nodes(self) -> np.ndarray:
        # beta/n rather than h*beta keeps both endpoints exact
        return np.arange(self.n + 1) / self.n


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class QuadratureRule:
    name: str
    grid: Grid
    c0: np.ndarray = field(repr=False)
    c1: np.ndarray = field(repr=False)

    def __post_init__(self):
        c0 = _frozen(self.c0)
        c1 = _frozen(self.c1)
        size = self.grid.n + 1
        if c0.shape != (size,) or c1.shape != (size,):
            raise ValueError(f"weight vectors must have length N+1 = {size}")
        if abs(math.fsum(c0) - 1.0) > 1e-12:
            raise ValueError("value weights must sum to 1")
        if not np.allclose(c0, c0[::-1], rtol=0.0, atol=1e-15):
            raise ValueError("value weights must be symmetric")
        object.__setattr__(self, "c0", c0)
        object.__setattr__(self, "c1", c1)

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def h(self) -> float:
        return self.grid.h

    def with_c1(self, c1, name: Optional[str] = None) -> "QuadratureRule":
        """Copy of this rule with different derivative weights."""
        return QuadratureRule(name or self.name, self.grid, self.c0, c1)


def trapezoid_weights(grid: Grid) -> np.ndarray:
    w = np.ones(grid.n + 1)
    w[0] = w[-1] = 0.5
    return grid.h * w


def optimal_endpoint_weight(h: float, method: str = "auto") -> float:
    """``h (e^h + 1) / (2 (e^h - 1)) - 1`` = ``h^2/12 - h^4/720 + ...``.

    ``method`` selects ``"direct"``, ``"series"`` or ``"auto"`` (series for
    ``h < 0.1``).
    """
    if method == "auto":
        return exp_bracket(h) / 2.0
    if method == "direct":
        return exp_bracket_direct(h) / 2.0
    if method == "series":
        return exp_bracket_series(h) / 2.0
    raise ValueError(f"unknown method {method!r}")


def optimal_derivative_weights(grid: Grid) -> np.ndarray:
    c1 = np.zeros(grid.n + 1)
    c1[0] = optimal_endpoint_weight(grid.h)
    c1[-1] = -c1[0]
    return c1


def _endpoint_rule(name: str, grid: Grid, endpoint: float) -> QuadratureRule:
    c1 = np.zeros(grid.n + 1)
    c1[0] = endpoint
    c1[-1] = -endpoint
    return QuadratureRule(name, grid, trapezoid_weights(grid), c1)


def trapezoid_rule(grid: Grid) -> QuadratureRule:
    return _endpoint_rule("trapezoid", grid, 0.0)


def optimal_rule(grid: Grid) -> QuadratureRule:
    return _endpoint_rule("optimal", grid, optimal_endpoint_weight(grid.h))


def euler_maclaurin_rule(grid: Grid) -> QuadratureRule:
    return _endpoint_rule("euler-maclaurin", grid, grid.h**2 / 12.0)


_BUILDERS = {
    "optimal": optimal_rule,
    "euler-maclaurin": euler_maclaurin_rule,
    "trapezoid": trapezoid_rule,
}


def build_rule(name: str, n: int) -> QuadratureRule:
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise ValueError(f"unknown rule {name!r}; expected one of {', '.join(RULE_NAMES)}") from None
    return builder(Grid(n))


# -- integrands ------------------------------------------------------------

_PROBES = np.linspace(0.0, 1.0, 13)[1:-1]  # 11 interior points
_FD_STEP = 1e-5


def _fd_mismatch(f, df) -> float:
    x = _PROBES
    fd = (np.asarray(f(x + _FD_STEP), float) - np.asarray(f(x - _FD_STEP), float)) / (2 * _FD_STEP)
    return float(np.max(np.abs(fd - np.asarray(df(x), float))))


@dataclass(frozen=True)
class IntegrandSpec:
    """Test function on ``[0, 1]`` with derivative(s) and exact integral.

    The callables take and return numpy arrays. ``f_prime`` (and
    ``f_second`` when given) are checked against central differences on
    construction.
    """

    name: str
    f: Callable
    f_prime: Callable
    exact_integral: Optional[float] = None
    f_second: Optional[Callable] = None

    def __post_init__(self):
        err = _fd_mismatch(self.f, self.f_prime)
        if err > 1e-6:
            raise ValueError(f"{self.name}: f_prime disagrees with finite differences by {err:.3g}")
        if self.f_second is not None:
            err = _fd_mismatch(self.f_prime, self.f_second)
            if err > 1e-5:
                raise ValueError(f"{self.name}: f_second disagrees with finite differences by {err:.3g}")


def _const(value):
    return lambda x: np.full(np.shape(x), value, dtype=float)


def _registry():
    pi = math.pi
    specs = [
        IntegrandSpec("one", _const(1.0), _const(0.0), 1.0, _const(0.0)),
        IntegrandSpec("x", lambda x: np.asarray(x, float), _const(1.0), 0.5, _const(0.0)),
        IntegrandSpec("xsq", lambda x: np.square(x), lambda x: 2.0 * np.asarray(x, float), 1.0 / 3.0, _const(2.0)),
        IntegrandSpec("xcube", lambda x: np.power(x, 3), lambda x: 3.0 * np.square(x), 0.25,
                      lambda x: 6.0 * np.asarray(x, float)),
        IntegrandSpec("exp", np.exp, np.exp, math.e - 1.0, np.exp),
        IntegrandSpec("expm", lambda x: np.exp(-np.asarray(x, float)), lambda x: -np.exp(-np.asarray(x, float)),
                      -math.expm1(-1.0), lambda x: np.exp(-np.asarray(x, float))),
        IntegrandSpec("sinpix", lambda x: np.sin(pi * np.asarray(x, float)),
                      lambda x: pi * np.cos(pi * np.asarray(x, float)), 2.0 / pi,
                      lambda x: -pi * pi * np.sin(pi * np.asarray(x, float))),
        IntegrandSpec("recip1p", lambda x: 1.0 / (1.0 + np.asarray(x, float)),
                      lambda x: -1.0 / (1.0 + np.asarray(x, float)) ** 2, math.log(2.0),
                      lambda x: 2.0 / (1.0 + np.asarray(x, float)) ** 3),
        IntegrandSpec("coshx", np.cosh, np.sinh, math.sinh(1.0), np.cosh),
    ]
    return {s.name: s for s in specs}


INTEGRANDS = _registry()


def get_integrand(name: str) -> IntegrandSpec:
    try:
        return INTEGRANDS[name]
    except KeyError:
        raise ValueError(f"unknown function {name!r}; expected one of {', '.join(INTEGRANDS)}") from None


def apply_rule(rule: QuadratureRule, integrand: IntegrandSpec) -> float:
    x = rule.grid.nodes
    fx = np.asarray(integrand.f(x), dtype=float)
    dfx = np.asarray(integrand.f_prime(x), dtype=float)
    return float(np.dot(rule.c0, fx) + np.dot(rule.c1, dfx))


def quadrature_error(rule: QuadratureRule, integrand: IntegrandSpec) -> float:
    """Signed error ``exact - approx``."""
    if integrand.exact_integral is None:
        raise ValueError(f"{integrand.name} has no exact integral")
    return integrand.exact_integral - apply_rule(rule, integrand)
