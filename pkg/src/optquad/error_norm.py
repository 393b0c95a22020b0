"""Squared norm of the quadrature error functional in W_2^(2,1)(0,1).

Three independent evaluations are provided:

* :func:`norm_sq_bruteforce` -- the general double-sum expression in terms
  of ``G2``, ``G2'``, ``G2''`` and the primitives ``H``, ``K``; valid for any
  weights satisfying the two exactness constraints.
* :func:`norm_sq_closed` -- ``1 - h/2 + h^2/12 - h/(e^h - 1)`` for the
  optimal rule.
* :func:`norm_sq_series` -- ``-sum_{n>=4} B_n h^n / n!``.

The brute-force sum is accumulated in mpmath: its groups are ``O(1e-2)``
while the result is ``O(h^4 / 720)``, so double rounding of the individual
kernel values alone would cost five or more digits at ``N = 100``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import mpmath
import numpy as np

from .bernoulli import BERNOULLI, BernoulliTable
from .errors import ConstraintError, DomainError
from .kernels import (
    g2,
    g2_antiderivative,
    g2_antiderivative_mp,
    g2_double_antiderivative_mp,
    g2_mp,
    g2_prime,
    g2_prime_mp,
    g2_second,
    g2_second_mp,
)
from .rules import IntegrandSpec, QuadratureRule

__all__ = [
    "BernoulliTable",
    "NormBreakdown",
    "constraint_residuals",
    "norm_sq_bruteforce",
    "norm_sq_closed",
    "norm_sq_series",
    "em_norm_sq",
    "eval_extremal_function",
    "eval_extremal_derivative",
    "extremal_asymmetry",
    "functional_value",
    "w21_seminorm",
]

CLOSED_SERIES_THRESHOLD = 0.3
_WORK_DPS = 40


@dataclass(frozen=True)
class NormBreakdown:
    """``total = a1 + a2 - 2 a3 + a4``.

    The groups and the total are each rounded once from an extended-precision
    accumulation, so :attr:`assembled` may differ from ``total`` by a few
    ulps of the largest group.
    """

    a1: float
    a2: float
    a3: float
    a4: float
    total: float

    @property
    def assembled(self) -> float:
        return self.a1 + self.a2 - 2.0 * self.a3 + self.a4


def _check_step(h: float) -> None:
    if not (0.0 < h <= 1.0):
        raise DomainError(f"step must lie in (0, 1], got {h!r}")


def constraint_residuals(rule: QuadratureRule) -> dict:
    """Residuals of exactness on ``1`` and on ``e^{-x}``."""
    e = np.exp(-rule.grid.nodes)
    return {
        "constant": 1.0 - math.fsum(rule.c0),
        "exp_minus": math.fsum([-math.expm1(-1.0), *(-rule.c0 * e), *(rule.c1 * e)]),
    }


def norm_sq_bruteforce(rule: QuadratureRule, tol: float = 1e-10) -> NormBreakdown:
    residuals = constraint_residuals(rule)
    if any(abs(r) > tol for r in residuals.values()):
        raise ConstraintError(
            "weights violate exactness on 1 or e^-x: "
            + ", ".join(f"{k}={v:.3e}" for k, v in residuals.items()),
            residuals,
        )
    n = rule.n
    with mpmath.workdps(_WORK_DPS):
        h = mpmath.mpf(1) / n
        c0 = [mpmath.mpf(float(v)) for v in rule.c0]
        c1 = [mpmath.mpf(float(v)) for v in rule.c1]
        # kernels depend on beta - gamma only; G2, G2'' even, G2' odd
        k0 = [g2_mp(k * h) for k in range(n + 1)]
        k1 = [g2_prime_mp(k * h) for k in range(n + 1)]
        k2 = [g2_second_mp(k * h) for k in range(n + 1)]

        def row(table, i, odd=False):
            return [(-table[j - i] if odd else table[j - i]) if j >= i else table[i - j] for j in range(n + 1)]

        a2 = mpmath.fdot(c0, [mpmath.fdot(c0, row(k0, i)) for i in range(n + 1)])

        active = [i for i in range(n + 1) if c1[i] != 0]
        quad = mpmath.fsum(c1[i] * mpmath.fdot(c1, row(k2, i)) for i in active)
        mixed = mpmath.fsum(c1[i] * mpmath.fdot(c0, row(k1, i, odd=True)) for i in active)
        # int_0^1 G2'(x - h beta) dx = G2(1 - h beta) - G2(h beta)
        edge = mpmath.fsum(c1[i] * (g2_mp(1 - i * h) - g2_mp(i * h)) for i in active)
        a1 = -quad + 2 * (edge + mixed)

        # int_0^1 G2(x - h beta) dx = H(1 - h beta) + H(h beta)
        a3 = mpmath.fsum(c0[i] * (g2_antiderivative_mp(1 - i * h) + g2_antiderivative_mp(i * h)) for i in range(n + 1))
        a4 = 2 * g2_double_antiderivative_mp(1)
        total = a1 + a2 - 2 * a3 + a4
        return NormBreakdown(float(a1), float(a2), float(a3), float(a4), float(total))


def norm_sq_series(h: float, tol: float = 1e-16) -> float:
    """``-sum_{n>=4} B_n h^n / n!`` = ``h^4/720 - h^6/30240 + ...``.

    Summation stops at the first term smaller than ``tol`` times the leading
    term ``h^4/720``, so ``tol`` is a relative truncation level.
    """
    _check_step(h)
    if not tol > 0:
        raise ValueError("tol must be positive")
    lead = -BERNOULLI.scaled(4) * h**4
    terms = [lead]
    for k in range(3, BERNOULLI.nmax // 2 + 1):
        term = -BERNOULLI.scaled(2 * k) * h ** (2 * k)
        if abs(term) < tol * lead:
            break
        terms.append(term)
    return math.fsum(reversed(terms))


def norm_sq_closed(h: float) -> float:
    """``1 - h/2 + h^2/12 - h/(e^h - 1)`` for the optimal rule."""
    _check_step(h)
    if h < CLOSED_SERIES_THRESHOLD:
        return norm_sq_series(h, tol=1e-18)
    # direct form cancels ~1 down to ~1e-5; evaluate it with guard digits
    with mpmath.workdps(_WORK_DPS):
        hm = mpmath.mpf(h)
        return float(1 - hm / 2 + hm * hm / 12 - hm / mpmath.expm1(hm))


def em_norm_sq(h: float) -> float:
    """Squared error norm of the Euler-Maclaurin rule in L_2^(2): ``h^4/720``."""
    _check_step(h)
    return h**4 / 720.0


def _require_constraints(rule: QuadratureRule, tol: float = 1e-10) -> None:
    residuals = constraint_residuals(rule)
    if any(abs(r) > tol for r in residuals.values()):
        raise ConstraintError("weights violate exactness on 1 or e^-x", residuals)


def _check_unit(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 1.0) or not np.all(np.isfinite(arr)):
        raise DomainError("extremal function is evaluated on [0, 1] only")
    return arr


def eval_extremal_function(rule: QuadratureRule, x):
    """``psi(x) = (l * G2)(x)`` with the free constant and ``e^{-x}`` term set to zero."""
    _require_constraints(rule)
    arr = _check_unit(x)
    diff = arr[..., None] - rule.grid.nodes
    value = (
        g2_antiderivative(arr)
        + g2_antiderivative(1.0 - arr)
        - np.sum(rule.c0 * g2(diff), axis=-1)
        + np.sum(rule.c1 * g2_prime(diff), axis=-1)
    )
    return float(value) if np.ndim(x) == 0 else value


def eval_extremal_derivative(rule: QuadratureRule, x):
    _require_constraints(rule)
    arr = _check_unit(x)
    diff = arr[..., None] - rule.grid.nodes
    value = (
        g2(arr)
        - g2(1.0 - arr)
        - np.sum(rule.c0 * g2_prime(diff), axis=-1)
        + np.sum(rule.c1 * g2_second(diff), axis=-1)
    )
    return float(value) if np.ndim(x) == 0 else value


def extremal_asymmetry(rule: QuadratureRule, samples: int = 201) -> float:
    """``max |psi(x) - psi(1 - x)|`` over a uniform sample; reported, not asserted."""
    x = np.linspace(0.0, 1.0, samples)
    return float(np.max(np.abs(eval_extremal_function(rule, x) - eval_extremal_function(rule, 1.0 - x))))


def functional_value(rule: QuadratureRule, f: Callable, f_prime: Callable, integral: float) -> float:
    """``(l, f) = integral - sum c0 f(h beta) - sum c1 f'(h beta)``."""
    x = rule.grid.nodes
    return math.fsum(
        [integral, *(-rule.c0 * np.asarray(f(x), float)), *(-rule.c1 * np.asarray(f_prime(x), float))]
    )


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


def _composite_gauss(fn: Callable, panels: int = 64) -> float:
    edges = np.linspace(0.0, 1.0, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    x = mid[:, None] + half[:, None] * _GL_NODES
    return float(np.sum(half[:, None] * _GL_WEIGHTS * np.asarray(fn(x), float)))


def w21_seminorm(integrand: IntegrandSpec, second_derivative: Optional[Callable] = None, panels: int = 64) -> float:
    """``[int_0^1 (f'' + f')^2 dx]^{1/2}``."""
    f2 = second_derivative or integrand.f_second
    if f2 is None:
        raise ValueError(f"{integrand.name}: no second derivative available")
    probes = np.linspace(0.0, 1.0, 13)[1:-1]
    step = 1e-5
    fd = (np.asarray(integrand.f_prime(probes + step), float) - np.asarray(integrand.f_prime(probes - step), float)) / (
        2 * step
    )
    mismatch = float(np.max(np.abs(fd - np.asarray(f2(probes), float))))
    if mismatch > 1e-5:
        raise ValueError(f"{integrand.name}: second derivative inconsistent with f_prime ({mismatch:.3g})")
    value = _composite_gauss(lambda x: (np.asarray(f2(x), float) + np.asarray(integrand.f_prime(x), float)) ** 2, panels)
    return math.sqrt(max(value, 0.0))
