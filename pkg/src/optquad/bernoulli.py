"""Bernoulli numbers and the small-step bracket shared by several closed forms.

The bracket ``h (e^h + 1) / (e^h - 1) - 2`` shows up in the endpoint
derivative weight, in the right-hand sides of the Lagrange system and in the
auxiliary constant of the three-branch ``u`` profile. It is ``O(h^2)`` and
loses digits to cancellation for small ``h``, so below a threshold it is
summed from its Bernoulli expansion instead.
"""

from __future__ import annotations

import math
from fractions import Fraction

__all__ = [
    "BERNOULLI",
    "BERNOULLI_MAX",
    "BernoulliTable",
    "bernoulli_table",
    "exp_bracket",
    "exp_bracket_direct",
    "exp_bracket_series",
]

BERNOULLI_MAX = 40
BRACKET_SERIES_THRESHOLD = 0.1


class BernoulliTable:
    """Bernoulli numbers ``B_0 .. B_nmax`` with the ``B_1 = -1/2`` convention.

    Exact values are kept as :class:`fractions.Fraction`; ``float(table[n])``
    and :meth:`as_float` give the nearest double.
    """

    def __init__(self, nmax: int = BERNOULLI_MAX) -> None:
        if nmax < 2:
            raise ValueError("nmax must be at least 2")
        b = [Fraction(1)]
        # sum_{k=0}^{m} C(m+1, k) B_k = 0
        for m in range(1, nmax + 1):
            acc = sum(math.comb(m + 1, k) * b[k] for k in range(m))
            b.append(-acc / (m + 1))
        if b[1] != Fraction(-1, 2) or b[2] != Fraction(1, 6) or b[4] != Fraction(-1, 30):
            raise RuntimeError("Bernoulli recurrence produced wrong seed values")
        self._exact = tuple(b)
        self._float = tuple(float(v) for v in b)

    @property
    def nmax(self) -> int:
        return len(self._exact) - 1

    def __len__(self) -> int:
        return len(self._exact)

    def __getitem__(self, n: int) -> Fraction:
        return self._exact[n]

    def as_float(self, n: int) -> float:
        return self._float[n]

    def scaled(self, n: int) -> float:
        """``B_n / n!`` rounded once to double."""
        return float(self._exact[n] / math.factorial(n))


BERNOULLI = BernoulliTable()


def bernoulli_table() -> BernoulliTable:
    return BERNOULLI


def exp_bracket_direct(h: float) -> float:
    # 2h/(e^h - 1) + h - 2; q - 1 is exact (Sterbenz) while q = h/(e^h - 1) >= 1/2
    return 2.0 * (h / math.expm1(h) - 1.0) + h


def exp_bracket_series(h: float) -> float:
    """``2 * sum_{k>=1} B_2k h^2k / (2k)!`` = ``2 (h^2/12 - h^4/720 + ...)``."""
    terms = []
    h2 = h * h
    power = h2
    for k in range(1, BERNOULLI.nmax // 2 + 1):
        term = BERNOULLI.scaled(2 * k) * power
        terms.append(term)
        if abs(term) < 1e-18 * abs(terms[0]):
            break
        power *= h2
    return 2.0 * math.fsum(reversed(terms))


def exp_bracket(h: float) -> float:
    """Evaluate ``h (e^h + 1) / (e^h - 1) - 2`` for ``h > 0``."""
    if not h > 0.0:
        raise ValueError(f"step must be positive, got {h!r}")
    if h < BRACKET_SERIES_THRESHOLD:
        return exp_bracket_series(h)
    return exp_bracket_direct(h)
