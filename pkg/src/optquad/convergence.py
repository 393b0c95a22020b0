"""Error sweeps over grids, log-log order fits and worst-case bound checks."""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InsufficientDataError
from .error_norm import norm_sq_closed
from .rules import Grid, IntegrandSpec, apply_rule, build_rule

__all__ = [
    "DEFAULT_N_VALUES",
    "ConvergenceRow",
    "FitResult",
    "BoundCheck",
    "run_sweep",
    "fit_order",
    "check_against_bound",
    "compare_rules",
    "power_law_rows",
]

DEFAULT_N_VALUES = (4, 8, 16, 32, 64, 128, 256)
NOISE_FACTOR = 1e2
BOUND_SLACK = 1e-12


@dataclass(frozen=True)
class ConvergenceRow:
    rule_name: str
    n: int
    h: float
    integrand_name: str
    approx: float
    exact: float
    abs_error: float


@dataclass(frozen=True)
class FitResult:
    rule_name: str
    integrand_name: str
    slope: float
    intercept: float
    r_squared: float
    n_range: tuple
    points: int


@dataclass(frozen=True)
class BoundCheck:
    row: ConvergenceRow
    bound: float
    satisfied: bool


def run_sweep(rules: Sequence[str], integrands: Sequence[IntegrandSpec], n_values: Sequence[int]) -> list:
    """One row per (rule, integrand, n), in that nesting order."""
    n_values = list(n_values)
    if any(b <= a for a, b in zip(n_values, n_values[1:])):
        raise ValueError("n_values must be strictly increasing")
    for spec in integrands:
        if spec.exact_integral is None:
            raise ValueError(f"{spec.name} has no exact integral")
    rows = []
    for rule_name in rules:
        built = [build_rule(rule_name, n) for n in n_values]
        for spec in integrands:
            for rule in built:
                approx = apply_rule(rule, spec)
                rows.append(
                    ConvergenceRow(
                        rule_name=rule_name,
                        n=rule.n,
                        h=rule.h,
                        integrand_name=spec.name,
                        approx=approx,
                        exact=spec.exact_integral,
                        abs_error=abs(spec.exact_integral - approx),
                    )
                )
    return rows


def _above_noise(row: ConvergenceRow) -> bool:
    return row.abs_error > NOISE_FACTOR * sys.float_info.epsilon * abs(row.exact)


def fit_order(rows: Iterable[ConvergenceRow], rule: str, integrand: str, min_points: int = 3) -> FitResult:
    """Least-squares slope of ``log(abs_error)`` against ``log(h)``."""
    usable = [r for r in rows if r.rule_name == rule and r.integrand_name == integrand and _above_noise(r)]
    if len(usable) < min_points:
        raise InsufficientDataError(
            f"{rule}/{integrand}: {len(usable)} rows above the noise floor, need {min_points}"
        )
    x = np.log([r.h for r in usable])
    y = np.log([r.abs_error for r in usable])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    ns = [r.n for r in usable]
    return FitResult(rule, integrand, float(slope), float(intercept), min(max(r2, 0.0), 1.0), (min(ns), max(ns)), len(usable))


def check_against_bound(rows: Iterable[ConvergenceRow], seminorms: Mapping[str, float]) -> list:
    """Compare each error with ``sqrt(norm_sq_closed(h)) * seminorm``."""
    out = []
    for row in rows:
        if row.integrand_name not in seminorms:
            raise KeyError(f"no seminorm for {row.integrand_name!r}")
        bound = math.sqrt(norm_sq_closed(row.h)) * seminorms[row.integrand_name]
        out.append(BoundCheck(row, bound, row.abs_error <= bound + BOUND_SLACK))
    return out


def compare_rules(rows: Iterable[ConvergenceRow], rule: str, reference: str, factor: float = 1.5) -> list:
    """Cells where ``rule`` does worse than ``factor`` times ``reference``.

    Returns ``(integrand, n, err_rule, err_reference)`` tuples; an empty list
    means no violation.
    """
    rows = list(rows)
    ref = {(r.integrand_name, r.n): r.abs_error for r in rows if r.rule_name == reference}
    violations = []
    for r in rows:
        if r.rule_name != rule or (r.integrand_name, r.n) not in ref:
            continue
        other = ref[(r.integrand_name, r.n)]
        if r.abs_error > factor * other and _above_noise(r):
            violations.append((r.integrand_name, r.n, r.abs_error, other))
    return violations


def power_law_rows(order: float = 4.0, n_values: Sequence[int] = DEFAULT_N_VALUES, name: str = "power") -> list:
    """Synthetic rows with ``abs_error = h**order`` for checking the fitter."""
    rows = []
    for n in n_values:
        h = Grid(n).h
        err = h**order
        rows.append(ConvergenceRow(name, n, h, name, err, 0.0, err))
    return rows
