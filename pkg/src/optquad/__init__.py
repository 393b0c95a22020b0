"""Optimal quadrature with endpoint-derivative corrections in W_2^(2,1)(0,1)."""

__version__ = "0.1.0"

from .rules import (  # noqa: E402
    INTEGRANDS,
    RULE_NAMES,
    Grid,
    IntegrandSpec,
    QuadratureRule,
    apply_rule,
    build_rule,
    euler_maclaurin_rule,
    optimal_rule,
    trapezoid_rule,
)
from .error_norm import norm_sq_bruteforce, norm_sq_closed, norm_sq_series  # noqa: E402

__all__ = [
    "INTEGRANDS",
    "RULE_NAMES",
    "Grid",
    "IntegrandSpec",
    "QuadratureRule",
    "apply_rule",
    "build_rule",
    "euler_maclaurin_rule",
    "optimal_rule",
    "trapezoid_rule",
    "norm_sq_bruteforce",
    "norm_sq_closed",
    "norm_sq_series",
]
