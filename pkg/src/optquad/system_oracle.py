"""Numerical solution of the bordered Lagrange system for ``c1`` and ``d``.

Rows ``beta = 0..N``::

    sum_gamma G2''(h beta - h gamma) c1[gamma] + e^{-h beta} d = F(h beta)

and a last row ``sum_gamma e^{-h gamma} c1[gamma] = g``. Solved by plain
Gaussian elimination with partial pivoting so the result is independent of
the closed-form weights it is compared against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .discrete_operator import rhs_f_closed, rhs_g_closed
from .errors import SingularSystemError
from .kernels import g2, g2_prime, g2_second
from .rules import Grid, trapezoid_weights

__all__ = [
    "LinearSystem",
    "OracleSolution",
    "rhs_f_direct",
    "rhs_g_direct",
    "assemble_system",
    "gauss_solve",
    "solve_oracle",
]

MAX_ORACLE_N = 5000
PIVOT_RTOL = 1e-13


@dataclass(frozen=True)
class LinearSystem:
    matrix: np.ndarray
    rhs: np.ndarray

    @property
    def dimension(self) -> int:
        return self.rhs.shape[0]


@dataclass(frozen=True)
class OracleSolution:
    c1: np.ndarray
    d: float
    residual_norm: float
    pivot_growth: float


def rhs_f_direct(grid: Grid, beta: int) -> float:
    """``F(h beta)`` summed from its definition, integral term in closed form."""
    if not 0 <= beta <= grid.n:
        raise IndexError(f"beta={beta} outside 0..{grid.n}")
    x = beta / grid.n
    nodes = grid.nodes
    c0 = trapezoid_weights(grid)
    # int_0^1 G2'(t - x) dt = G2(1 - x) - G2(-x), and G2 is even
    terms = list(c0 * g2_prime(x - nodes))
    terms.append(g2(1.0 - x))
    terms.append(-g2(x))
    return math.fsum(terms)


def rhs_g_direct(grid: Grid) -> float:
    c0 = trapezoid_weights(grid)
    terms = list(c0 * np.exp(-grid.nodes))
    terms.append(math.exp(-1.0))
    terms.append(-1.0)
    return math.fsum(terms)


def assemble_system(grid: Grid, rhs: str = "closed") -> LinearSystem:
    """Dense ``(N+2) x (N+2)`` system; ``rhs`` is ``"closed"`` or ``"direct"``."""
    n = grid.n
    nodes = grid.nodes
    a = np.zeros((n + 2, n + 2))
    a[: n + 1, : n + 1] = g2_second(nodes[:, None] - nodes[None, :])
    a[: n + 1, n + 1] = np.exp(-nodes)
    a[n + 1, : n + 1] = np.exp(-nodes)
    b = np.empty(n + 2)
    if rhs == "closed":
        b[: n + 1] = rhs_f_closed(grid, np.arange(n + 1))
        b[n + 1] = rhs_g_closed(grid)
    elif rhs == "direct":
        b[: n + 1] = [rhs_f_direct(grid, beta) for beta in range(n + 1)]
        b[n + 1] = rhs_g_direct(grid)
    else:
        raise ValueError(f"unknown rhs mode {rhs!r}")
    return LinearSystem(a, b)


def gauss_solve(a: np.ndarray, b: np.ndarray, pivot_rtol: float = PIVOT_RTOL):
    """Solve ``a x = b`` by elimination with partial pivoting.

    Returns ``(x, growth)`` where ``growth`` is the largest intermediate
    entry over the largest initial entry. Raises
    :class:`SingularSystemError` when a pivot drops below ``pivot_rtol``
    times the largest initial magnitude in its column.
    """
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    n = b.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square and match the right-hand side")
    col_scale = np.max(np.abs(a), axis=0)
    initial_max = float(np.max(np.abs(a))) if n else 0.0
    running_max = initial_max

    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[p, k]) <= pivot_rtol * col_scale[k]:
            raise SingularSystemError(f"pivot {a[p, k]:.3e} in column {k} below threshold")
        if p != k:
            a[[k, p]] = a[[p, k]]
            b[[k, p]] = b[[p, k]]
        factors = a[k + 1 :, k] / a[k, k]
        a[k + 1 :, k:] -= np.outer(factors, a[k, k:])
        b[k + 1 :] -= factors * b[k]
        if k + 1 < n:
            running_max = max(running_max, float(np.max(np.abs(a[k + 1 :, k + 1 :]))))

    x = np.empty(n)
    for k in range(n - 1, -1, -1):
        x[k] = (b[k] - np.dot(a[k, k + 1 :], x[k + 1 :])) / a[k, k]
    growth = running_max / initial_max if initial_max else 1.0
    return x, growth


def solve_oracle(grid: Grid, rhs: str = "closed") -> OracleSolution:
    if grid.n > MAX_ORACLE_N:
        raise ValueError(f"dense oracle limited to n <= {MAX_ORACLE_N}")
    system = assemble_system(grid, rhs)
    x, growth = gauss_solve(system.matrix, system.rhs)
    residual = float(np.max(np.abs(system.matrix @ x - system.rhs)))
    return OracleSolution(c1=x[:-1], d=float(x[-1]), residual_norm=residual, pivot_growth=growth)
