"""End-to-end invariant suite behind ``optquad verify``.

Each check returns a :class:`CheckResult`; a check that raises is recorded as
failed with the exception text. ``tamper`` shifts one weight of every
optimal rule the suite builds, which must make the suite fail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .convergence import DEFAULT_N_VALUES, ConvergenceRow, fit_order, power_law_rows, run_sweep
from .discrete_operator import build_u_profile, reconstruct_c1, rhs_f_closed, rhs_g_closed, verify_d1_identities
from .error_norm import em_norm_sq, norm_sq_bruteforce, norm_sq_closed, norm_sq_series, w21_seminorm
from .rules import INTEGRANDS, Grid, QuadratureRule, apply_rule, get_integrand, optimal_rule, quadrature_error
from .system_oracle import rhs_f_direct, rhs_g_direct, solve_oracle

__all__ = ["CheckResult", "Tamper", "run_verification", "STANDARD_N"]

STANDARD_N = (1, 2, 3, 5, 10, 25, 50, 100)
NORM_N = (1, 2, 5, 10, 50, 100)
PERTURB_N = (1, 5, 20)
BOUND_N = (2, 10, 50)
EXACT_SET = ("one", "x", "exp", "expm")


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class Tamper:
    """Shift ``c0`` or ``c1`` at ``index`` (negative counts from the end) by ``delta``."""

    which: str
    index: int
    delta: float

    @classmethod
    def parse(cls, text: str) -> "Tamper":
        which, index, delta = text.split(":")
        if which not in ("c0", "c1"):
            raise ValueError("tamper target must be c0 or c1")
        return cls(which, int(index), float(delta))

    def apply(self, rule: QuadratureRule) -> QuadratureRule:
        size = rule.n + 1
        if not -size <= self.index < size:
            return rule
        c0 = np.array(rule.c0)
        c1 = np.array(rule.c1)
        target = c0 if self.which == "c0" else c1
        target[self.index] += self.delta
        return QuadratureRule(rule.name, rule.grid, c0, c1)


def _upto(values, n_max):
    return [n for n in values if n <= n_max]


class _Suite:
    def __init__(self, n_max: int, tamper: Optional[Tamper], seed: int):
        self.n_max = n_max
        self.tamper = tamper
        self.seed = seed

    def optimal(self, n: int) -> QuadratureRule:
        rule = optimal_rule(Grid(n))
        return self.tamper.apply(rule) if self.tamper else rule

    def d1_identities(self):
        worst = max(verify_d1_identities(h, 50).max_scaled for h in (1.0, 0.1, 0.01))
        return worst <= 1e-11, f"max scaled residual {worst:.2e} (tol 1e-11)"

    def oracle_agreement(self):
        worst_c1 = worst_d = worst_res = 0.0
        for n in _upto(STANDARD_N, self.n_max):
            sol = solve_oracle(Grid(n))
            worst_c1 = max(worst_c1, float(np.max(np.abs(sol.c1 - self.optimal(n).c1))))
            worst_d = max(worst_d, abs(sol.d))
            worst_res = max(worst_res, sol.residual_norm)
        ok = worst_c1 <= 1e-10 and worst_d <= 1e-10 and worst_res <= 1e-10
        return ok, f"max|dc1| {worst_c1:.2e}, max|d| {worst_d:.2e}, residual {worst_res:.2e}"

    def rhs_paths(self):
        worst = 0.0
        for n in _upto(STANDARD_N, self.n_max):
            grid = Grid(n)
            for beta in range(n + 1):
                worst = max(worst, abs(rhs_f_direct(grid, beta) - rhs_f_closed(grid, beta)))
            worst = max(worst, abs(rhs_g_direct(grid) - rhs_g_closed(grid)))
        return worst <= 1e-13, f"max difference {worst:.2e} (tol 1e-13)"

    def reconstruction(self):
        worst = branch = 0.0
        for n in _upto(STANDARD_N, self.n_max):
            grid = Grid(n)
            worst = max(worst, float(np.max(np.abs(reconstruct_c1(grid) - self.optimal(n).c1))))
            branch = max(branch, *build_u_profile(grid).branch_residuals())
        return worst <= 1e-11 and branch <= 1e-12, f"max|dc1| {worst:.2e}, branch residual {branch:.2e}"

    def exactness(self):
        worst = 0.0
        for n in range(1, self.n_max + 1):
            rule = self.optimal(n)
            for name in EXACT_SET:
                spec = INTEGRANDS[name]
                err = abs(quadrature_error(rule, spec)) / (1.0 + abs(spec.exact_integral))
                worst = max(worst, err)
        return worst <= 1e-13, f"max scaled error {worst:.2e} over n=1..{self.n_max}"

    def triple_agreement(self):
        worst_small = worst_large = 0.0
        for n in _upto(NORM_N, self.n_max):
            h = 1.0 / n
            values = (norm_sq_bruteforce(self.optimal(n)).total, norm_sq_closed(h), norm_sq_series(h, 1e-16))
            spread = max(abs(a - b) / abs(b) for a in values for b in values)
            if n <= 10:
                worst_small = max(worst_small, spread)
            else:
                worst_large = max(worst_large, spread)
        spot = norm_sq_bruteforce(self.optimal(1)).total
        ok = worst_small <= 1e-12 and worst_large <= 1e-8 and abs(spot - 1.356626e-3) <= 1e-9
        return ok, f"rel spread n<=10 {worst_small:.2e}, n>10 {worst_large:.2e}, h=1 total {spot:.9e}"

    def leading_constant(self):
        parts, ok = [], True
        for n, tol in ((10, 3e-3), (100, 3e-5)):
            if n > self.n_max:
                continue
            dev = abs(norm_sq_closed(1.0 / n) * 720.0 * n**4 - 1.0)
            ok &= dev <= tol
            parts.append(f"n={n}: {dev:.2e}")
        return ok, ", ".join(parts) or "skipped"

    def em_dominance(self):
        ratios = [norm_sq_closed(h) / em_norm_sq(h) for h in (1.0, 0.5, 0.1, 0.01)]
        ok = all(0.9 < r < 1.0 for r in ratios)
        return ok, "ratios " + ", ".join(f"{r:.6f}" for r in ratios)

    def optimality(self):
        rng = np.random.default_rng(self.seed)
        worst = math.inf
        for n in _upto(PERTURB_N, self.n_max):
            base = self.optimal(n)
            ref = norm_sq_bruteforce(base).total
            e = np.exp(-base.grid.nodes)
            for _ in range(100):
                delta = rng.standard_normal(n + 1)
                delta -= (delta @ e) / (e @ e) * e
                delta *= 1e-3 / np.max(np.abs(delta))
                gain = norm_sq_bruteforce(base.with_c1(base.c1 + delta)).total - ref
                worst = min(worst, gain)
        return worst >= -1e-12, f"smallest increase {worst:.3e}"

    def error_bound(self):
        names = [k for k, v in INTEGRANDS.items() if v.f_second is not None]
        seminorms = {k: w21_seminorm(INTEGRANDS[k]) for k in names}
        worst = -math.inf
        failures = 0
        for n in _upto(BOUND_N, self.n_max):
            rule = self.optimal(n)
            bound = math.sqrt(norm_sq_closed(rule.h))
            for k in names:
                slack = abs(quadrature_error(rule, INTEGRANDS[k])) - bound * seminorms[k]
                worst = max(worst, slack)
                failures += slack > 1e-12
        return failures == 0, f"{failures} violations, worst error-bound {worst:.2e}"

    def empirical_order(self):
        spec = get_integrand("recip1p")
        rows = run_sweep(["optimal", "euler-maclaurin", "trapezoid"], [spec], DEFAULT_N_VALUES)
        if self.tamper:
            # rebuild the optimal rows from tampered rules
            rows = [r for r in rows if r.rule_name != "optimal"] + _rows_for(self.optimal, spec)
        slopes = {name: fit_order(rows, name, "recip1p").slope for name in ("optimal", "euler-maclaurin", "trapezoid")}
        power = fit_order(power_law_rows(), "power", "power").slope
        ok = (
            3.7 <= slopes["optimal"] <= 4.3
            and 3.7 <= slopes["euler-maclaurin"] <= 4.3
            and 1.8 <= slopes["trapezoid"] <= 2.2
            and abs(power - 4.0) <= 1e-6
        )
        return ok, ", ".join(f"{k} {v:.4f}" for k, v in slopes.items()) + f", power-law {power:.6f}"


def _rows_for(build: Callable, spec):
    rows = []
    for n in DEFAULT_N_VALUES:
        rule = build(n)
        approx = apply_rule(rule, spec)
        rows.append(ConvergenceRow("optimal", n, rule.h, spec.name, approx, spec.exact_integral, abs(spec.exact_integral - approx)))
    return rows


_CHECKS = (
    ("discrete-operator-identities", "d1_identities"),
    ("oracle-coefficient-agreement", "oracle_agreement"),
    ("rhs-path-agreement", "rhs_paths"),
    ("convolution-reconstruction", "reconstruction"),
    ("exactness-set", "exactness"),
    ("norm-triple-agreement", "triple_agreement"),
    ("leading-constant", "leading_constant"),
    ("euler-maclaurin-dominance", "em_dominance"),
    ("optimality-perturbation", "optimality"),
    ("error-bound", "error_bound"),
    ("empirical-order", "empirical_order"),
)


def run_verification(n_max: int = 100, tamper: Optional[Tamper] = None, seed: int = 20190101) -> list:
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    suite = _Suite(n_max, tamper, seed)
    results = []
    for name, attr in _CHECKS:
        try:
            passed, detail = getattr(suite, attr)()
        except Exception as exc:  # a raising check is a failing check
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(passed), detail))
    return results
