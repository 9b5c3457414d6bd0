"""Command-line front end.

Exit status: 0 success, 1 check/suite failure, 2 usage error, 3 numeric
budget exhausted.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import math
import sys
from typing import Optional, Sequence

from postwidder import combinatorics as comb
from postwidder import harness
from postwidder import symbolic as sym
from postwidder.catalog import jet_of, make_spec
from postwidder.errors import BudgetError, DivergenceError, DomainError, SpecParseError
from postwidder.opeval import (
    OperatorParams,
    QuadratureConfig,
    eval_operator,
    eval_via_0F1,
    expansion_partial_sum,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _int_range(text: str) -> list[int]:
    """``"3"`` or ``"1..4"``."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        return [int(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or a range like 1..4, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _cfg(args) -> QuadratureConfig:
    return QuadratureConfig(rel_tol=args.tol) if args.tol is not None else QuadratureConfig()


def _grid(args) -> list[float]:
    if args.n_grid:
        return args.n_grid
    if args.n_min is None or args.n_max is None:
        raise UsageError("give --n-grid or both --n-min and --n-max")
    return harness.geometric_grid(args.n_min, args.n_max, args.points)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, default=str) + "\n"


def _aligned(pairs) -> str:
    width = max(len(k) for k, _ in pairs)
    return "".join(f"{k:<{width}}  {v}\n" for k, v in pairs)


def _table_text(header: Sequence[str], rows) -> str:
    cells = [list(header)] + [[f"{v:.12g}" if isinstance(v, float) else str(v) for v in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) + "\n" for r in cells)


# ---------------------------------------------------------------------------
# subcommands; each returns (text, exit status)

def cmd_coeffs(args):
    if args.dump_stirling is not None:
        R = args.dump_stirling
        if R < 0:
            raise UsageError("--dump-stirling needs R >= 0")
        lines = ["# stirling1_unsigned [r;l], rows r=0..R, columns l=0..r"]
        lines += ["\t".join(str(comb.stirling1_unsigned(r, l)) for l in range(r + 1)) for r in range(R + 1)]
        lines.append("# assoc_stirling1 s2(i,j), rows i=0..R, columns j=0..floor(i/2)")
        lines += ["\t".join(str(comb.assoc_stirling1(i, j)) for j in range(i // 2 + 1)) for i in range(R + 1)]
        return "\n".join(lines) + "\n", EXIT_OK
    ks = args.k or [1, 2, 3, 4]
    if min(ks) < 1:
        raise UsageError("--k needs k >= 1")
    tables = [sym.c_table(k) for k in ks]
    if args.beta0:
        tables = [t.at_beta_zero() for t in tables]
    if args.format == "json":
        return _dump([t.to_json() for t in tables]), EXIT_OK
    if args.format == "csv":
        rows = ["k,s,j,coeff,x_power"]
        rows += [f"{t.k},{r.s},{r.j},{r.coeff},{r.x_power}" for t in tables for r in t.rows]
        return "\n".join(rows) + "\n", EXIT_OK
    return "".join(t.render() + "\n" for t in tables), EXIT_OK


def cmd_moments(args):
    fn = sym.central_moment_poly if args.central else sym.moment_poly
    label = "central_moment" if args.central else "moment"
    polys = [(r, fn(r)) for r in args.r]
    if args.format == "json":
        return _dump([{"r": r, "kind": label, "text": str(p), "terms": p.to_json()} for r, p in polys]), EXIT_OK
    if args.format == "csv":
        rows = ["r,deg_x,deg_b,deg_invn,coeff"]
        rows += [f"{r},{e[0]},{e[1]},{e[2]},{c}" for r, p in polys for e, c in p.terms()]
        return "\n".join(rows) + "\n", EXIT_OK
    return "".join(f"{p}\n" for _, p in polys), EXIT_OK


def cmd_eval(args):
    f = make_spec(args.function)
    p = OperatorParams(args.n, args.beta, args.x)
    rep = (eval_via_0F1 if args.via_0f1 else eval_operator)(f, p, _cfg(args))
    out = {"function": f.id, "n": args.n, "beta": args.beta, "x": args.x, **rep.to_dict()}
    ref = f.closed_form_image(args.n, args.beta, args.x) if f.has_closed_form and args.x > 0 else None
    if ref is not None:
        out["closed_form"] = ref
        out["closed_form_rel_diff"] = abs(rep.value - ref) / abs(ref) if ref else abs(rep.value)
    if args.format == "json":
        return _dump(out), EXIT_OK
    if args.format == "csv":
        keys = [k for k in out if k != "warnings"]
        return ",".join(keys) + "\n" + ",".join(
            f"{out[k]:.17g}" if isinstance(out[k], float) else str(out[k]) for k in keys) + "\n", EXIT_OK
    pairs = [(k, f"{v:.17g}" if isinstance(v, float) else (";".join(v) or "-") if isinstance(v, list) else str(v))
             for k, v in out.items()]
    return _aligned(pairs), EXIT_OK


def cmd_expand(args):
    f = make_spec(args.function)
    jet = jet_of(f, args.x, 2 * args.q)
    cfg = _cfg(args)
    rows = [(0, jet.values[0], jet.values[0])]
    for k in range(1, args.q + 1):
        rows.append((k, sym.c_value(k, jet, args.beta), expansion_partial_sum(jet, args.beta, args.n, k)))
    if f.has_closed_form:
        value, method = f.closed_form_image(args.n, args.beta, args.x), "closed_form"
    else:
        value, method = eval_operator(f, OperatorParams(args.n, args.beta, args.x), cfg).value, "quadrature"
    residual = value - rows[-1][2]
    if args.format == "json":
        return _dump({"function": f.id, "x": args.x, "n": args.n, "beta": args.beta, "q": args.q,
                      "operator_value": value, "method": method, "residual": residual,
                      "terms": [{"k": k, "c_k": c, "partial_sum": s} for k, c, s in rows]}), EXIT_OK
    if args.format == "csv":
        body = "".join(f"{k},{c:.17g},{s:.17g}\n" for k, c, s in rows)
        return "k,c_k,partial_sum\n" + body, EXIT_OK
    text = _table_text(["k", "c_k", "partial_sum"], rows)
    text += _aligned([("operator_value", f"{value:.17g} ({method})"), ("residual", f"{residual:.6e}")])
    return text, EXIT_OK


def cmd_converge(args):
    f = make_spec(args.function)
    rep = harness.converge(f, args.x, args.beta, args.q, args.n_min, args.n_max, args.points, _cfg(args),
                           use_closed_form=not args.quadrature)
    status = EXIT_OK
    if args.check:
        status = EXIT_OK if abs(rep.fitted_slope - rep.expected_slope) <= args.slope_tol else EXIT_FAIL
    if args.format == "json":
        return _dump(rep.to_dict()), status
    if args.format == "csv":
        return rep.csv(), status
    text = _table_text(["n", "value", "reference", "residual", "fitted"],
                       [(n, v, r, res, "yes" if inc else "no") for n, v, r, res, inc in
                        zip(rep.grid, rep.values, rep.references, rep.residuals, rep.included)])
    text += _aligned([("fitted_slope", f"{rep.fitted_slope:.6f} +/- {rep.slope_ci_halfwidth:.6f}"),
                      ("expected_slope", str(rep.expected_slope)), ("path", rep.path)])
    return text, status


def cmd_voronovskaja(args):
    f = make_spec(args.function)
    tab = harness.voronovskaja_probe(f, args.x, args.beta, _grid(args), _cfg(args),
                                     use_closed_form=not args.quadrature)
    if args.format == "json":
        return _dump(tab.to_dict()), EXIT_OK
    if args.format == "csv":
        return tab.csv(), EXIT_OK
    text = _table_text(["n", "n*(P_n f - f)", "deviation"], list(zip(tab.grid, tab.scaled, tab.deviations)))
    text += _aligned([("limit", f"{tab.limit:.17g}"), ("last_deviation", f"{tab.last_deviation:.6e}"),
                      ("monotone", str(tab.monotone))])
    return text, EXIT_OK


def cmd_localize(args):
    base = make_spec(args.base)
    if base.is_cutout:
        raise UsageError("--base must be a catalog function, not a cutout")
    tab = harness.localization_probe(base, args.x, args.beta, args.delta, _grid(args), _cfg(args),
                                     max_slope=args.max_slope)
    status = EXIT_OK if tab.passed else EXIT_FAIL
    if args.format == "json":
        return _dump(tab.to_dict()), status
    if args.format == "csv":
        return tab.csv(), status
    text = _table_text(["n", "value", "err_estimate", "flagged"],
                       [(n, v, e, "yes" if fl else "no") for n, v, e, fl in
                        zip(tab.grid, tab.values, tab.errors, tab.flagged)])
    text += _aligned([("fitted_slope", f"{tab.fitted_slope:.6f} +/- {tab.slope_ci_halfwidth:.6f}"),
                      ("required", f"<= {tab.max_slope}"), ("result", "PASS" if tab.passed else "FAIL")])
    return text, status


def cmd_selftest(args, out):
    return harness.selftest(args.only, out=out)


# ---------------------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--format", choices=("json", "csv", "text"), default=argparse.SUPPRESS)
    p.add_argument("--tol", type=float, default=argparse.SUPPRESS, help="relative quadrature tolerance")
    p.add_argument("--out", metavar="PATH", default=argparse.SUPPRESS, help="write output here instead of stdout")
    return p


def _point_args(p, n=True):
    p.add_argument("--function", required=True, help="function spec, e.g. exp:A=1")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--beta", type=float, default=0.0)
    if n:
        p.add_argument("--n", type=float, required=True)


def _grid_args(p, default_points=7):
    p.add_argument("--n-grid", type=_float_list, help="comma-separated n values")
    p.add_argument("--n-min", type=float)
    p.add_argument("--n-max", type=float)
    p.add_argument("--points", type=int, default=default_points)


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="postwidder", parents=[common],
                                 description="Semi-exponential Post-Widder operators: exact tables and numerics.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", parents=[common], help="expansion coefficient tables c_k")
    p.add_argument("--k", type=_int_range, help="order or range, e.g. 3 or 1..4 (default 1..4)")
    p.add_argument("--beta0", action="store_true", help="drop beta terms")
    p.add_argument("--dump-stirling", type=int, metavar="R", help="print Stirling triangles up to R as TSV")

    p = sub.add_parser("moments", parents=[common], help="moment polynomials")
    p.add_argument("--r", type=_int_range, required=True, help="order or range")
    p.add_argument("--central", action="store_true")

    p = sub.add_parser("eval", parents=[common], help="evaluate P_n^beta f(x)")
    _point_args(p)
    p.add_argument("--via-0f1", action="store_true", help="use the 0F1 kernel representation")

    p = sub.add_parser("expand", parents=[common], help="partial sums of the asymptotic expansion")
    _point_args(p)
    p.add_argument("--q", type=int, default=2)

    p = sub.add_parser("converge", parents=[common], help="residual slope study")
    _point_args(p, n=False)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--n-min", type=float, required=True)
    p.add_argument("--n-max", type=float, required=True)
    p.add_argument("--points", type=int, default=7)
    p.add_argument("--quadrature", action="store_true", help="ignore closed forms")
    p.add_argument("--check", action="store_true", help="exit 1 unless slope is within --slope-tol of -(q+1)")
    p.add_argument("--slope-tol", type=float, default=0.15)

    p = sub.add_parser("voronovskaja", parents=[common], help="n(P_n f - f) against its limit")
    _point_args(p, n=False)
    _grid_args(p)
    p.add_argument("--quadrature", action="store_true", help="ignore closed forms")

    p = sub.add_parser("localize", parents=[common], help="decay of the operator on a cut-out function")
    p.add_argument("--base", required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--delta", type=float, required=True)
    _grid_args(p)
    p.add_argument("--max-slope", type=float, default=-3.0)

    p = sub.add_parser("selftest", parents=[common], help="run the identity suites")
    p.add_argument("--only", action="append", choices=sorted(harness.SUITES), help="repeatable")
    return ap


COMMANDS = {
    "coeffs": cmd_coeffs, "moments": cmd_moments, "eval": cmd_eval, "expand": cmd_expand,
    "converge": cmd_converge, "voronovskaja": cmd_voronovskaja, "localize": cmd_localize,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    args.format = getattr(args, "format", "text")
    args.tol = getattr(args, "tol", None)
    out_path = getattr(args, "out", None)
    with contextlib.ExitStack() as stack:
        out = stack.enter_context(open(out_path, "w", newline="")) if out_path else sys.stdout
        try:
            if args.command == "selftest":
                return cmd_selftest(args, out)
            text, status = COMMANDS[args.command](args)
        except (UsageError, SpecParseError, DomainError, DivergenceError) as exc:
            print(f"postwidder {args.command}: error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        except BudgetError as exc:
            print(f"postwidder {args.command}: budget exhausted: {exc}", file=sys.stderr)
            return EXIT_BUDGET
        out.write(text)
        return status


if __name__ == "__main__":
    sys.exit(main())
