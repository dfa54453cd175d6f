"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

from .algebra import AlgebraError, Ctx, to_json as elem_json, to_text
from .calculus import CalculusError, mat2_act, pullback
from .coef import CoefError
from .cohomology import CohomologyError, TruncationSpec, betti, named_differential, pairing_report
from .integrate import (
    IntegrationError,
    MetricSpec,
    QuadSettings,
    euler_integral,
    gorm_from_exponent,
    integrate_gorm,
)
from .rep_theory import CONVENTIONS, RepError, YoungTable, decompose_report, schur_dim, tetris_sequence

INPUT_ERRORS = (
    AlgebraError,
    CalculusError,
    CoefError,
    CohomologyError,
    IntegrationError,
    RepError,
    json.JSONDecodeError,
    OSError,
)


def emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n")


def _coords(text: str) -> list[str]:
    names = [c.strip() for c in text.split(",") if c.strip()]
    if not names:
        raise argparse.ArgumentTypeError("need at least one coordinate name")
    return names


def _matrix(text: str) -> list[list[Fraction]]:
    try:
        rows = [[Fraction(v.strip()) for v in row.split(",")] for row in text.split(";")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad matrix {text!r}; expected 'a,b;c,d'") from None
    if len(rows) != 2 or any(len(r) != 2 for r in rows):
        raise argparse.ArgumentTypeError("matrix must be 2x2, e.g. '1,0;0,1'")
    return rows


def _settings(args) -> QuadSettings:
    return QuadSettings(nodes=args.nodes, workers=args.workers, refine=not args.no_refine)


def cmd_check(args) -> int:
    from .checks import SUITES

    names = args.suite or list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise RepError(f"unknown suite(s) {unknown}; available: {sorted(SUITES)}")
    results = []
    failed = False
    for name in names:
        res = SUITES[name]()
        results.append(res)
        if not res.passed:
            failed = True
            if not args.keep_going:
                break
    if args.json:
        emit({"passed": not failed, "suites": [r.to_json() for r in results]})
    else:
        for res in results:
            for c in res.checks:
                mark = "PASS" if c.passed else "FAIL"
                extra = f"  [{c.detail}]" if c.detail and (args.verbose or not c.passed) else ""
                print(f"{mark} {res.suite}: {c.name}{extra}")
        print("all suites passed" if not failed else "verification failed")
    return 1 if failed else 0


def cmd_transform(args) -> int:
    ctx = Ctx(args.n, coords=args.coords)
    if (args.map is None) == (args.mat2 is None):
        raise CalculusError("give exactly one of --map or --mat2")
    if args.map is not None:
        phi = pullback(ctx, [s for s in args.map.split(";")])
    else:
        phi = mat2_act(ctx, args.mat2)
    out = {"context": repr(ctx), "images": {}}
    for text in args.elem:
        img = phi(ctx.parse(text))
        out["images"][text] = {"text": to_text(img), "json": elem_json(img)}
    if not args.elem:
        out["generators"] = {ctx.gens[k].label: to_text(v) for k, v in sorted(phi.gen_images.items())}
    emit(out)
    return 0


def cmd_integrate(args) -> int:
    ctx = Ctx(2, coords=args.coords)
    poly = ctx.parse(args.poly) if args.poly else None
    g = gorm_from_exponent(ctx.parse(args.exponent), poly)
    res = integrate_gorm(g, json.loads(args.domain) if args.domain.startswith("{") else args.domain, _settings(args))
    out = {
        "value": res.value,
        "error_estimate": res.error_estimate,
        "symbolic_zero": res.symbolic_zero,
        "top_coefficient": to_text(res.top) if res.top is not None else None,
        "wick_rational": str(res.wick.rat) if res.wick is not None else None,
        "wick_factor": "pi^(m/2) * det(B)^(-1/2)",
    }
    if args.expect is not None:
        expect = eval_constant(args.expect)
        out["expected"] = expect
        out["abs_error"] = abs(res.value - expect)
        out["passed"] = out["abs_error"] <= args.tol
    emit(out)
    return 1 if out.get("passed") is False else 0


def eval_constant(text: str) -> float:
    """Numeric constant such as ``pi`` or ``pi/sqrt(2)`` (no names beyond pi, sqrt)."""
    import sympy

    try:
        expr = sympy.sympify(text, locals={"pi": sympy.pi, "sqrt": sympy.sqrt})
    except (sympy.SympifyError, SyntaxError, TypeError):
        raise RepError(f"--expect: cannot parse {text!r}") from None
    if expr.free_symbols:
        raise RepError(f"--expect: not a constant: {text!r}")
    return float(expr)


def cmd_euler(args) -> int:
    metric = MetricSpec.from_json(args.metric)
    rep = euler_integral(metric, _settings(args))
    out = rep.to_json()
    out["metric"] = metric.to_json()
    out["abs_value_over_4pi2"] = abs(rep.value) / (4 * math.pi ** 2) if metric.dim == 2 else None
    status = 0
    if args.verify:
        ok = rep.relative_error is not None and rep.relative_error <= args.tol
        out["verified"] = ok
        status = 0 if ok else 1
    emit(out)
    return status


def cmd_decompose(args) -> int:
    rep = decompose_report(args.m, args.max_degree, args.convention)
    out = rep.to_json()
    out["table"] = rep.text_table().splitlines()
    emit(out)
    if args.text:
        sys.stderr.write(rep.text_table() + "\n")
    return 0 if rep.ok else 1


def cmd_cohomology(args) -> int:
    D, ctx = named_differential(args.diff, args.m)
    trunc = TruncationSpec(args.trunc, args.max_x_degree)
    rep = betti(D, trunc, args.diff)
    out = rep.to_json()
    if args.pairings:
        out["pairings"] = pairing_report(args.m, args.trunc)
    emit(out)
    return 0


def cmd_tetris(args) -> int:
    ell = YoungTable.parse(args.table)
    seq = tetris_sequence(ell)
    out = {"table": list(ell.rows), "sequence": [list(t.rows) for t in seq]}
    if args.m:
        out["schur_dims"] = [schur_dim(t, args.m) for t in seq]
        out["tilde_dim"] = sum(out["schur_dims"])
    emit(out)
    return 0


def cmd_schur(args) -> int:
    print(schur_dim(YoungTable.parse(args.table), args.m))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="worms", description="Worm algebra Ω_[n](M): exact calculus, Berezin integrals, fiber counts.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="run invariant suites")
    p.add_argument("--suite", action="append", help="suite name (repeatable); default: all")
    p.add_argument("--json", action="store_true", help="JSON report instead of text")
    p.add_argument("--keep-going", action="store_true", help="do not stop at the first failing suite")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("transform", help="apply a pullback or Mat(2) action to elements")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--coords", type=_coords, default=["x"])
    p.add_argument("--map", help="coordinate change images separated by ';', e.g. 'x^2'")
    p.add_argument("--mat2", type=_matrix, help="2x2 matrix 'a,b;c,d'")
    p.add_argument("--elem", action="append", default=[], help="element to transform (repeatable)")
    p.set_defaults(func=cmd_transform)

    def quad_flags(q):
        q.add_argument("--nodes", type=int, default=400, help="Gauss-Legendre nodes per axis")
        q.add_argument("--workers", type=int, default=None, help="threads for node evaluation")
        q.add_argument("--no-refine", action="store_true", help="skip the half-grid error estimate")

    p = sub.add_parser("integrate", help="integrate e^{exponent} * poly over a chart")
    p.add_argument("--coords", type=_coords, default=["x"])
    p.add_argument("--exponent", required=True, help="e.g. '-x^2 - d12(x)^2'")
    p.add_argument("--poly", default=None, help="e.g. 'd1(x)*d2(x)'")
    p.add_argument("--domain", default="line", help="line, plane, or JSON domain object")
    p.add_argument("--expect", default=None, help="expected value, e.g. 'pi'")
    p.add_argument("--tol", type=float, default=1e-9)
    quad_flags(p)
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("euler", help="Euler-characteristic integral of a metric")
    p.add_argument("--metric", required=True, help="metric JSON file")
    p.add_argument("--verify", action="store_true", help="exit 1 unless within --tol of the prediction")
    p.add_argument("--tol", type=float, default=1e-3)
    quad_flags(p)
    p.set_defaults(func=cmd_euler)

    p = sub.add_parser("decompose", help="dimension accounting of bidegree fibers")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--max-degree", type=int, required=True)
    p.add_argument("--convention", choices=CONVENTIONS, default="e12")
    p.add_argument("--text", action="store_true", help="also print the grid to stderr")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("cohomology", help="Betti numbers of a truncated complex")
    p.add_argument("--diff", choices=["d", "d1", "d2", "r1", "r2"], required=True)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--trunc", type=int, default=4, help="total degree bound")
    p.add_argument("--max-x-degree", type=int, default=None, help="coefficient degree bound (0 = fibers)")
    p.add_argument("--pairings", action="store_true", help="report both projections to forms")
    p.set_defaults(func=cmd_cohomology)

    p = sub.add_parser("tetris", help="cotangent-tetris sequence of a two-column table")
    p.add_argument("--table", required=True, help="row lengths, e.g. 2,2,1")
    p.add_argument("--m", type=int, default=None)
    p.set_defaults(func=cmd_tetris)

    p = sub.add_parser("schur", help="dimension of a Schur functor")
    p.add_argument("--table", required=True)
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=cmd_schur)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except INPUT_ERRORS as exc:
        sys.stderr.write(f"worms {args.command}: error: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
