"""Discrete analog of ``d^2/dx^2 - 1`` and the convolution route to ``c1``.

``D1`` is the three-point kernel with ``D1 * G1 = delta_d`` on the grid
``h*beta``. Convolving it with the three-branch profile ``u`` (equal to the
right-hand side ``F`` on the grid and to exponentials outside) gives the
optimal derivative weights without solving any linear system. All
convolutions here are exact three-term sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bernoulli import exp_bracket
from .errors import DomainError
from .kernels import MAX_ABS_X, g1
from .rules import Grid

__all__ = [
    "DiscreteKernel",
    "IdentityReport",
    "UProfile",
    "d1_at",
    "verify_d1_identities",
    "rhs_f_closed",
    "rhs_g_closed",
    "build_u_profile",
    "reconstruct_c1",
]


def _check_step(h: float) -> None:
    if not (0.0 < h <= 1.0):
        raise DomainError(f"step must lie in (0, 1], got {h!r}")


def d1_at(h: float, beta: int) -> float:
    _check_step(h)
    beta = abs(int(beta))
    if beta >= 2:
        return 0.0
    # 1/(1 - e^{2h}) = -1/expm1(2h)
    scale = -1.0 / math.expm1(2.0 * h)
    if beta == 1:
        return -2.0 * math.exp(h) * scale
    return 2.0 * (1.0 + math.exp(2.0 * h)) * scale


@dataclass(frozen=True)
class DiscreteKernel:
    """``D1`` at offsets ``-1, 0, 1`` for a fixed step."""

    h: float

    def __post_init__(self):
        _check_step(self.h)

    @property
    def center(self) -> float:
        return d1_at(self.h, 0)

    @property
    def side(self) -> float:
        return d1_at(self.h, 1)

    def value(self, beta: int) -> float:
        return d1_at(self.h, beta)

    def convolve(self, fn, beta: int) -> tuple[float, float]:
        """``(sum_{|g|<=1} D1(h g) fn(h (beta - g)), sum of |terms|)``."""
        terms = [self.value(g) * fn(self.h * (beta - g)) for g in (-1, 0, 1)]
        return math.fsum(terms), math.fsum(abs(t) for t in terms)

    def annihilation_residual(self) -> float:
        """Relative residual of ``D1(0) + D1(1) (e^h + e^-h) = 0``."""
        c, s = self.center, self.side
        e2 = 2.0 * math.cosh(self.h)
        return abs(c + s * e2) / abs(c)


@dataclass(frozen=True)
class IdentityReport:
    """Maximal residuals of the defining identities of ``D1``.

    ``*_scaled`` divide each residual by ``max(1, sum of |terms|)``, which is
    what double precision can resolve once ``e^{h|beta|}`` is large.
    """

    h: float
    beta_range: int
    delta: float
    exp_plus: float
    exp_minus: float
    delta_scaled: float
    exp_plus_scaled: float
    exp_minus_scaled: float
    center_value: float

    @property
    def max_scaled(self) -> float:
        return max(self.delta_scaled, self.exp_plus_scaled, self.exp_minus_scaled)

    @property
    def max_abs(self) -> float:
        return max(self.delta, self.exp_plus, self.exp_minus)


def _g1_any(x: float) -> float:
    # the kernel module refuses |x| > 50; h = 1 with |beta| = 50 reaches 51
    if abs(x) <= MAX_ABS_X:
        return g1(x)
    return 0.5 * math.sinh(abs(x))


def verify_d1_identities(h: float, beta_range: int) -> IdentityReport:
    _check_step(h)
    if beta_range < 2:
        raise ValueError("beta_range must be at least 2")
    kernel = DiscreteKernel(h)
    raw = {"delta": 0.0, "plus": 0.0, "minus": 0.0}
    scaled = dict(raw)
    center_value = math.nan
    checks = {
        "delta": _g1_any,
        "plus": math.exp,
        "minus": lambda x: math.exp(-x),
    }
    for beta in range(-beta_range, beta_range + 1):
        for key, fn in checks.items():
            value, size = kernel.convolve(fn, beta)
            if key == "delta":
                if beta == 0:
                    center_value = value
                value -= 1.0 if beta == 0 else 0.0
            raw[key] = max(raw[key], abs(value))
            scaled[key] = max(scaled[key], abs(value) / max(1.0, size))
    return IdentityReport(
        h=h,
        beta_range=beta_range,
        delta=raw["delta"],
        exp_plus=raw["plus"],
        exp_minus=raw["minus"],
        delta_scaled=scaled["delta"],
        exp_plus_scaled=scaled["plus"],
        exp_minus_scaled=scaled["minus"],
        center_value=center_value,
    )


def rhs_f_closed(grid: Grid, beta) -> float:
    """Closed form of the Lagrange right-hand side ``F(h beta)``."""
    x = np.asarray(beta, dtype=float) / grid.n
    e = math.e
    value = (np.exp(x) * (1.0 / e + 1.0) - np.exp(-x) * (e + 1.0)) / 8.0 * exp_bracket(grid.h)
    return float(value) if np.ndim(value) == 0 else value


def rhs_g_closed(grid: Grid) -> float:
    """Closed form of the constraint right-hand side ``g``."""
    return -0.5 * math.expm1(-1.0) * exp_bracket(grid.h)


@dataclass(frozen=True)
class UProfile:
    """Three-branch ``u(h beta)``: exponentials left of 0 and right of N, ``F`` between."""

    grid: Grid
    d: float
    big_d: float
    g: float

    @property
    def h(self) -> float:
        return self.grid.h

    @property
    def n(self) -> int:
        return self.grid.n

    def left(self, beta: int) -> float:
        x = beta / self.n
        return -0.25 * math.exp(x) * self.g + (self.d + self.big_d) * math.exp(-x)

    def middle(self, beta: int) -> float:
        return rhs_f_closed(self.grid, beta)

    def right(self, beta: int) -> float:
        x = beta / self.n
        return 0.25 * math.exp(x) * self.g + (self.d - self.big_d) * math.exp(-x)

    def __call__(self, beta: int) -> float:
        if beta < 0:
            return self.left(beta)
        if beta > self.n:
            return self.right(beta)
        return self.middle(beta)

    def branch_residuals(self) -> tuple[float, float]:
        """Mismatch of the outer branches against ``F`` at ``beta = 0`` and ``N``."""
        return (
            abs(self.left(0) - self.middle(0)),
            abs(self.right(self.n) - self.middle(self.n)),
        )


def build_u_profile(grid: Grid) -> UProfile:
    bracket = exp_bracket(grid.h)
    return UProfile(
        grid=grid,
        d=0.0,
        big_d=bracket * (1.0 - math.e) / 8.0,
        g=rhs_g_closed(grid),
    )


def reconstruct_c1(grid: Grid) -> np.ndarray:
    """``c1[beta] = (D1 * u)(h beta)`` for ``beta = 0..N``."""
    kernel = DiscreteKernel(grid.h)
    u = build_u_profile(grid)
    weights = (kernel.side, kernel.center, kernel.side)
    out = np.empty(grid.n + 1)
    for beta in range(grid.n + 1):
        out[beta] = math.fsum(w * u(beta - g) for w, g in zip(weights, (-1, 0, 1)))
    return out
