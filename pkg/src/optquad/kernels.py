"""Fundamental solutions ``G_m`` and the ``G_2`` family with primitives.

All functions accept a scalar or an array and return the same shape. Every
kernel is written as ``sgn(x)/2`` (or ``1/2``) times a tail of the exponential
Taylor series, e.g. ``G_2(x) = sgn(x)/2 * (sinh x - x)``. For ``|x| < 3`` the
tail is summed directly from its series, which keeps full relative accuracy
where ``sinh x - x`` and friends would otherwise cancel.
"""

from __future__ import annotations

import math

import mpmath
import numpy as np

from .errors import DomainError

__all__ = [
    "MAX_ABS_X",
    "g_m",
    "g1",
    "g2",
    "g2_prime",
    "g2_second",
    "g2_antiderivative",
    "g2_double_antiderivative",
    "taylor_tail",
    "g2_mp",
    "g2_prime_mp",
    "g2_second_mp",
    "g2_antiderivative_mp",
    "g2_double_antiderivative_mp",
]

MAX_ABS_X = 50.0
_SERIES_RADIUS = 3.0
# 3^(p+2k)/(p+2k)! is below 1e-25 of the leading term by k = 19
_SERIES_TERMS = 20


def _as_checked(x):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("kernel argument must be finite")
    if np.any(np.abs(arr) > MAX_ABS_X):
        raise DomainError(f"kernel argument exceeds |x| <= {MAX_ABS_X:g}")
    return arr


def _wrap(x, value):
    if np.ndim(x) == 0:
        return float(value)
    return value


def taylor_tail(x, start: int):
    """``sum_{p >= start, p = start mod 2} x**p / p!``.

    Odd ``start`` gives ``sinh x`` minus its first terms, even ``start`` gives
    ``cosh x`` minus its first terms.
    """
    if start < 0:
        raise ValueError("start must be non-negative")
    arr = _as_checked(x)
    # work on |x| and restore parity last so that tail(-x) is exactly +-tail(x)
    ax = np.abs(arr)
    small = ax < _SERIES_RADIUS

    # series branch, Horner from the highest retained power down
    xs = np.where(small, ax, 0.0)
    x2 = xs * xs
    acc = np.zeros_like(xs)
    for k in range(_SERIES_TERMS - 1, -1, -1):
        acc = acc * x2 + 1.0 / math.factorial(start + 2 * k)
    series = acc * xs**start

    xl = np.where(small, 0.0, ax)
    direct = np.sinh(xl) if start % 2 else np.cosh(xl)
    for p in range(start % 2, start, 2):
        direct = direct - xl**p / math.factorial(p)

    value = np.where(small, series, direct)
    if start % 2:
        value = np.where(arr < 0, -value, value)
    return _wrap(x, value)


def g_m(m: int, x):
    """Kernel ``G_m(x) = sgn(x)/2 * (sinh x - sum_{k<m} x^(2k-1)/(2k-1)!)``.

    Only ``m = 1, 2`` are used by the rest of the package; for large ``m`` and
    ``|x| >= 1`` the subtraction branch loses relative accuracy.
    """
    if int(m) != m or m < 1:
        raise DomainError(f"m must be a positive integer, got {m!r}")
    arr = _as_checked(x)
    return _wrap(x, 0.5 * np.sign(arr) * taylor_tail(arr, 2 * int(m) - 1))


def g1(x):
    return g_m(1, x)


def g2(x):
    return g_m(2, x)


def g2_prime(x):
    arr = _as_checked(x)
    return _wrap(x, 0.5 * np.sign(arr) * taylor_tail(arr, 2))


def g2_second(x):
    # identical to G_1 by construction
    return g_m(1, x)


def g2_antiderivative(x):
    """Odd primitive ``H`` of ``G_2`` with ``H(0) = 0``.

    ``H(x) = sgn(x)/2 * (cosh x - 1 - x^2/2)``, so that
    ``int_0^1 G_2(x - a) dx = H(1 - a) + H(a)``.
    """
    arr = _as_checked(x)
    return _wrap(x, 0.5 * np.sign(arr) * taylor_tail(arr, 4))


def g2_double_antiderivative(x):
    """Even primitive ``K`` of ``H`` with ``K(0) = 0``.

    ``K(x) = (sinh|x| - |x| - |x|^3/6) / 2``; the double integral of
    ``G_2(x - y)`` over the unit square is ``2 K(1)``.
    """
    arr = _as_checked(x)
    return _wrap(x, 0.5 * taylor_tail(np.abs(arr), 5))


# Extended-precision variants (mpmath), used where O(h^4) results are
# assembled from O(1e-2) pieces and double rounding of the pieces dominates.


def g2_mp(x):
    x = mpmath.mpf(x)
    return mpmath.sign(x) / 2 * (mpmath.sinh(x) - x)


def g2_prime_mp(x):
    x = mpmath.mpf(x)
    return mpmath.sign(x) / 2 * (mpmath.cosh(x) - 1)


def g2_second_mp(x):
    x = mpmath.mpf(x)
    return mpmath.sign(x) / 2 * mpmath.sinh(x)


def g2_antiderivative_mp(x):
    x = mpmath.mpf(x)
    return mpmath.sign(x) / 2 * (mpmath.cosh(x) - 1 - x * x / 2)


def g2_double_antiderivative_mp(x):
    ax = abs(mpmath.mpf(x))
    return (mpmath.sinh(ax) - ax - ax**3 / 6) / 2
