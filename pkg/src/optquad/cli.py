"""``optquad`` command line: coefficients, norms, integration, sweeps, verification.

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from typing import Optional, Sequence

from . import __version__
from .convergence import DEFAULT_N_VALUES, check_against_bound, compare_rules, fit_order, power_law_rows, run_sweep
from .errors import InsufficientDataError
from .error_norm import em_norm_sq, norm_sq_bruteforce, norm_sq_closed, norm_sq_series, w21_seminorm
from .rules import INTEGRANDS, RULE_NAMES, apply_rule, build_rule, get_integrand
from .verify import Tamper, run_verification

SCHEMA_VERSION = "1"
CONVERGENCE_COLUMNS = ("rule", "n", "h", "function", "approx", "exact", "abs_error")
FIT_COLUMNS = ("rule", "function", "slope", "intercept", "r_squared", "n_min", "n_max", "points")
NORM_METHODS = ("closed", "series", "bruteforce", "all")


class UsageError(Exception):
    pass


# -- serialization ----------------------------------------------------------


def fmt_real(x) -> str:
    if isinstance(x, bool) or x is None:
        return "" if x is None else str(x).lower()
    if isinstance(x, float):
        if math.isnan(x) or math.isinf(x):
            return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
        return format(x, ".17g")
    return str(x)


def _json(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return "null"
        return format(obj, ".17g")
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, str):
        import json

        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{_json(str(k))}: {_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def envelope(command: str, parameters: dict, **payload) -> str:
    body = {"schema_version": SCHEMA_VERSION, "command": command, "parameters": parameters}
    body.update(payload)
    body["generated"] = "deterministic"
    return _json(body) + "\n"


def csv_table(columns: Sequence[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt_real(v) for v in row])
    return buf.getvalue()


# -- commands ---------------------------------------------------------------


def cmd_coeffs(args) -> tuple[str, int]:
    rule = build_rule(args.rule, args.n)
    nodes = rule.grid.nodes
    # "+ 0.0" folds a negated zero weight to 0
    rows = [(b, float(nodes[b]), float(rule.c0[b]), float(rule.c1[b]) + 0.0) for b in range(rule.n + 1)]
    columns = ("beta", "h_beta", "c0", "c1")
    if args.format == "json":
        payload = [dict(zip(columns, r)) for r in rows]
        return envelope("coeffs", {"n": args.n, "rule": args.rule}, rows=payload), 0
    return csv_table(columns, rows), 0


def norm_values(n: int, method: str) -> dict:
    h = 1.0 / n
    values = {}
    if method in ("closed", "all"):
        values["closed"] = norm_sq_closed(h)
    if method in ("series", "all"):
        values["series"] = norm_sq_series(h, 1e-16)
    if method in ("bruteforce", "all"):
        from .rules import Grid, optimal_rule

        b = norm_sq_bruteforce(optimal_rule(Grid(n)))
        values.update(bruteforce=b.total, a1=b.a1, a2=b.a2, a3=b.a3, a4=b.a4)
    if method == "all":
        paths = ("closed", "series", "bruteforce")
        for i, p in enumerate(paths):
            for q in paths[i + 1 :]:
                values[f"reldiff_{p}_{q}"] = abs(values[p] - values[q]) / abs(values[q])
        values["em"] = em_norm_sq(h)
    return values


def cmd_norm(args) -> tuple[str, int]:
    values = norm_values(args.n, args.method)
    if args.format == "json":
        return envelope("norm", {"n": args.n, "method": args.method, "h": 1.0 / args.n}, values=values), 0
    return csv_table(("quantity", "value"), values.items()), 0


def cmd_integrate(args) -> tuple[str, int]:
    spec = get_integrand(args.function)
    rule = build_rule(args.rule, args.n)
    approx = apply_rule(rule, spec)
    signed = spec.exact_integral - approx
    bound = None
    # the worst-case bound is only defined for weights exact on 1 and e^-x
    if args.rule == "optimal" and spec.f_second is not None:
        bound = math.sqrt(norm_sq_closed(rule.h)) * w21_seminorm(spec)
    values = {
        "approx": approx,
        "exact": spec.exact_integral,
        "signed_error": signed,
        "abs_error": abs(signed),
        "bound": bound,
    }
    params = {"n": args.n, "rule": args.rule, "function": args.function}
    if args.format == "json":
        return envelope("integrate", params, values=values), 0
    columns = ("rule", "n", "function", *values.keys())
    return csv_table(columns, [(args.rule, args.n, args.function, *values.values())]), 0


def _parse_list(text: str, kind=str) -> list:
    try:
        items = [kind(t.strip()) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse list {text!r}: {exc}") from None
    if not items:
        raise UsageError(f"empty list {text!r}")
    return items


def cmd_convergence(args) -> tuple[str, int]:
    if args.selftest_power4:
        rows = power_law_rows(4.0)
        fits = [fit_order(rows, "power", "power")]
        violations, bounds = [], []
        rules, functions, n_values = ["power"], ["power"], list(DEFAULT_N_VALUES)
    else:
        rules = _parse_list(args.rules)
        functions = _parse_list(args.functions)
        n_values = _parse_list(args.n_list, int)
        for r in rules:
            if r not in RULE_NAMES:
                raise UsageError(f"unknown rule {r!r}")
        for f in functions:
            if f not in INTEGRANDS:
                raise UsageError(f"unknown function {f!r}")
        if min(n_values) < 1 or any(b <= a for a, b in zip(n_values, n_values[1:])):
            raise UsageError("--n-list must be strictly increasing positive integers")
        rows = run_sweep(rules, [INTEGRANDS[f] for f in functions], n_values)
        fits = []
        for r in rules:
            for f in functions:
                try:
                    fits.append(fit_order(rows, r, f))
                except InsufficientDataError:
                    pass
        violations = []
        if "optimal" in rules and "euler-maclaurin" in rules:
            violations = compare_rules(rows, "optimal", "euler-maclaurin")
        bounds = []
        if "optimal" in rules:
            seminorms = {f: w21_seminorm(INTEGRANDS[f]) for f in functions if INTEGRANDS[f].f_second is not None}
            optimal_rows = [r for r in rows if r.rule_name == "optimal" and r.integrand_name in seminorms]
            bounds = check_against_bound(optimal_rows, seminorms)

    row_tuples = [(r.rule_name, r.n, r.h, r.integrand_name, r.approx, r.exact, r.abs_error) for r in rows]
    fit_tuples = [
        (f.rule_name, f.integrand_name, f.slope, f.intercept, f.r_squared, f.n_range[0], f.n_range[1], f.points)
        for f in fits
    ]
    if args.format == "json":
        params = {"rules": rules, "functions": functions, "n_list": n_values, "selftest_power4": args.selftest_power4}
        return (
            envelope(
                "convergence",
                params,
                rows=[dict(zip(CONVERGENCE_COLUMNS, t)) for t in row_tuples],
                fits=[dict(zip(FIT_COLUMNS, t)) for t in fit_tuples],
                optimal_vs_euler_maclaurin_violations=[
                    {"function": v[0], "n": v[1], "optimal_error": v[2], "euler_maclaurin_error": v[3]}
                    for v in violations
                ],
                bound_failures=[
                    {"function": b.row.integrand_name, "n": b.row.n, "abs_error": b.row.abs_error, "bound": b.bound}
                    for b in bounds
                    if not b.satisfied
                ],
            ),
            0,
        )
    return csv_table(CONVERGENCE_COLUMNS, row_tuples) + "\n" + csv_table(FIT_COLUMNS, fit_tuples), 0


def cmd_verify(args) -> tuple[str, int]:
    tamper = Tamper.parse(args.tamper) if args.tamper else None
    results = run_verification(args.n_max, tamper=tamper)
    status = 0 if all(r.passed for r in results) else 1
    if args.format == "json":
        payload = [{"check": r.name, "passed": r.passed, "detail": r.detail} for r in results]
        return envelope("verify", {"n_max": args.n_max}, rows=payload, passed=status == 0), status
    if args.format == "csv":
        return csv_table(("check", "passed", "detail"), [(r.name, r.passed, r.detail) for r in results]), status
    lines = [f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}" for r in results]
    lines.append(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
    return "\n".join(lines) + "\n", status


# -- parser -----------------------------------------------------------------


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="optquad", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def fmt(p, choices=("csv", "json"), default="csv"):
        p.add_argument("--format", choices=choices, default=default)

    p = sub.add_parser("coeffs", help="print quadrature weights")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--rule", choices=RULE_NAMES, default="optimal")
    fmt(p)
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("norm", help="squared norm of the optimal error functional")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--method", choices=NORM_METHODS, default="closed")
    fmt(p)
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("integrate", help="apply a rule to a built-in function")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--rule", choices=RULE_NAMES, default="optimal")
    p.add_argument("--function", choices=tuple(INTEGRANDS), required=True)
    fmt(p)
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("convergence", help="error sweep and fitted convergence orders")
    p.add_argument("--rules", default=",".join(RULE_NAMES))
    p.add_argument("--functions", default="recip1p")
    p.add_argument("--n-list", default=",".join(str(n) for n in DEFAULT_N_VALUES))
    p.add_argument("--selftest-power4", action="store_true", help="fit synthetic h^4 errors instead")
    fmt(p)
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("verify", help="run the full invariant suite")
    p.add_argument("--n-max", type=_positive_int, default=100)
    p.add_argument("--tamper", help=argparse.SUPPRESS)
    fmt(p, choices=("text", "csv", "json"), default="text")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text, status = args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"optquad: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError) as exc:
        print(f"optquad: error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
