"""Command-line front end.

Subcommands ``angle``, ``iv``, ``absorption``, ``sections`` and ``verify``
print CSV or JSON tables. Exit status is 0 on success, 1 when a verification
fails and 2 for usage or parameter errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from . import absorption, acceptance, conic, sections
from .core import (
    AbsorptionFamily,
    AbsorptionQuery,
    ConeFamily,
    ConeSpec,
    ParameterError,
    PolytopeFamily,
    PolytopeSpec,
)
from .gfun import EvalMethod, g_cross, g_cube, g_simplex
from .mc import oracles
from .mc.rng import THREADS_ENV, default_threads

DEFAULT_SAMPLES = 10 ** 5
NSIGMA = 4.0


class UsageError(Exception):
    pass


def _count(text):
    """Parse a positive sample count; accepts ``1e4`` style input."""
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not (math.isfinite(v) and v >= 1 and v == int(v)):
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return int(v)


def _int_list(text):
    try:
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}")


def _float_list(text):
    try:
        return [float(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected numbers, got {text!r}")


def _seed(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}")
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _common(p):
    p.add_argument("--method", choices=("quadrature", "mc"), default="quadrature")
    p.add_argument("--samples", type=_count, default=None)
    p.add_argument("--seed", type=_seed, default=None)
    p.add_argument("--threads", type=int, default=None,
                   help=f"worker threads (default: ${THREADS_ENV} or 1)")
    p.add_argument("--tol", type=float, default=1e-10, help="quadrature tolerance")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None, help="write the table to PATH instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="conic-geom", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("angle", help="solid angles of the three cone families")
    p.add_argument("--family", choices=("simplex", "cross", "cube"), required=True)
    p.add_argument("--n", type=_int_list, required=True)
    p.add_argument("--r", type=_float_list)
    p.add_argument("--sigma2", type=_float_list)
    _common(p)

    p = sub.add_parser("iv", help="conic intrinsic volumes")
    p.add_argument("--family", choices=("simplex", "cross", "cube"), required=True)
    p.add_argument("--n", type=_int_list, required=True)
    p.add_argument("--r", type=_float_list)
    p.add_argument("--sigma2", type=_float_list)
    p.add_argument("--l", type=int, default=None, help="also report the Grassmann angle of codimension l")
    _common(p)

    p = sub.add_parser("absorption", help="non-absorption probabilities with Monte Carlo check")
    p.add_argument("--family", choices=("cross", "cube"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--sigma2", type=_float_list)
    p.add_argument("--u", type=_float_list)
    p.add_argument("--lambda", dest="lam", type=_float_list)
    _common(p)

    p = sub.add_parser("sections", help="expected face numbers of random central sections")
    p.add_argument("--family", choices=("simplex", "cross", "cube"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--j", type=_int_list, required=True)
    p.add_argument("--oracle2d", action="store_true", help="add exact planar section counts (k = 2)")
    _common(p)

    p = sub.add_parser("verify", help="run the acceptance checks")
    p.add_argument("--only", type=_int_list, default=None, help="comma-separated check numbers")
    _common(p)
    return parser


# ---------------------------------------------------------------- output

def _num(x):
    if x is None:
        return None
    if isinstance(x, bool):
        return x
    if isinstance(x, int):
        return x
    return float(x)


def _json_value(v):
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if not math.isfinite(v):
            return "null"
        return format(v, ".17g")
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, dict):
        return "{" + ", ".join(f"{_json_value(str(k))}: {_json_value(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_json_value(x) for x in v) + "]"
    return _json_value(str(v))


def render(rows, fmt) -> str:
    if fmt == "json":
        return "[\n" + ",\n".join("  " + _json_value(r) for r in rows) + "\n]\n"
    buf = io.StringIO()
    header = []
    for r in rows:
        for k in r:
            if k not in header:
                header.append(k)
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for r in rows:
        w.writerow(["" if r.get(k) is None else (repr(r[k]) if isinstance(r[k], float) else r[k])
                    for k in header])
    return buf.getvalue()


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- commands

def _method(args):
    if args.method == "mc":
        if args.seed is None:
            raise UsageError("--method mc requires --seed")
        return EvalMethod.mc(args.samples or 10 ** 6, args.seed, args.threads)
    return EvalMethod.quadrature(args.tol)


def _cone_params(args):
    fam = ConeFamily(args.family)
    if fam is ConeFamily.SIMPLEX:
        if args.sigma2 is not None or args.r is None:
            raise UsageError("the simplex family takes --r (and not --sigma2)")
        return fam, args.r
    if args.r is not None or args.sigma2 is None:
        raise UsageError(f"the {fam.value} family takes --sigma2 (and not --r)")
    return fam, args.sigma2


def cmd_angle(args):
    fam, params = _cone_params(args)
    meth = _method(args)
    fn = {ConeFamily.SIMPLEX: g_simplex, ConeFamily.CROSS: g_cross, ConeFamily.CUBE: g_cube}[fam]
    rows = []
    for n in args.n:
        for p in params:
            ConeSpec(fam, n, p)
            g = fn(n, p, meth)
            rows.append({"family": fam.value, "n": n, "param": p, "value": g.value,
                         "error_bound": g.error_bound, "method": meth.kind})
    return rows


def cmd_iv(args):
    fam, params = _cone_params(args)
    meth = _method(args)
    rows = []
    for n in args.n:
        for p in params:
            c = ConeSpec(fam, n, p)
            v = conic.intrinsic_volumes(c, meth)
            extra = {}
            if args.l is not None:
                q = conic.GrassmannQuery(c, args.l)
                hit, miss = conic.grassmann_angle_from(v, q.l)
                extra = {"l": q.l, "grassmann": hit, "grassmann_complement": miss}
            for k in range(len(v)):
                rows.append({"family": fam.value, "n": n, "param": p, "k": k, "value": v[k],
                             "stderr": v.error(k), "sum": v.total(), "odd_sum": v.odd_sum(), **extra})
    return rows


def _need_seed(args):
    if args.seed is None:
        raise UsageError(f"`{args.command}` is randomized and requires --seed")


def _agree(formula, est, atol=0.0):
    return abs(formula - est.mean) <= max(NSIGMA * est.stderr, atol)


def cmd_absorption(args):
    _need_seed(args)
    given = [x for x in ("sigma2", "u", "lam") if getattr(args, x) is not None]
    if len(given) != 1:
        raise UsageError("give exactly one of --sigma2, --u, --lambda")
    fam = AbsorptionFamily.parse(args.family)
    AbsorptionQuery(fam, args.n, args.d)
    samples = args.samples or DEFAULT_SAMPLES
    rows = []
    for x in getattr(args, given[0]):
        row = {"family": args.family, "n": args.n, "d": args.d}
        atol = 0.0
        if given[0] == "sigma2":
            q = AbsorptionQuery(fam, args.n, args.d, s2=x)
            formula = absorption.p_family(fam, args.n, args.d, x, _method(args))
            est = oracles.estimate_random_point_absorption(q, samples, args.seed, args.threads)
            row.update({"param": "sigma2", "value": x})
        elif given[0] == "u":
            if fam is not AbsorptionFamily.SYMMETRIC_GAUSSIAN or args.d != 2:
                raise UsageError("--u is available for --family cross with --d 2")
            q = AbsorptionQuery(fam, args.n, args.d, u=x)
            formula = absorption.f_cross_d2(args.n, x)
            est = oracles.estimate_absorption(q, math.sqrt(2 * x), samples, args.seed, args.threads)
            row.update({"param": "u", "value": x})
        else:
            formula = absorption.laplace_rhs(fam, args.n, args.d, x, _method(args))
            est = absorption.laplace_lhs_numeric(fam, args.n, args.d, x, samples, args.seed, args.threads)
            atol = 0.02 * abs(formula)
            row.update({"param": "lambda", "value": x})
        row.update({"formula_value": formula, "mc_value": est.mean, "mc_stderr": est.stderr,
                    "samples": est.samples, "discarded": est.discarded, "agree": _agree(formula, est, atol)})
        rows.append(row)
    return rows


_POLY = {"simplex": PolytopeFamily.SIMPLEX, "cross": PolytopeFamily.CROSSPOLYTOPE, "cube": PolytopeFamily.CUBE}


def cmd_sections(args):
    _need_seed(args)
    p = PolytopeSpec(_POLY[args.family], args.n)
    if args.oracle2d and args.k != 2:
        raise UsageError("--oracle2d needs --k 2")
    samples = args.samples or DEFAULT_SAMPLES
    meth = _method(args)
    poly = sections.estimate_polygon_vertices(p, samples, args.seed, args.threads) if args.oracle2d else None
    rows = []
    for j in args.j:
        q = sections.SectionQuery(p, args.k, j)
        formula = sections.expected_faces(q, meth)
        est = sections.estimate_expected_faces(q, samples, args.seed, args.threads)
        row = {"family": args.family, "n": args.n, "k": args.k, "j": j, "expected_formula": formula,
               "mc_estimate": est.mean, "mc_stderr": est.stderr, "agree": _agree(formula, est)}
        if poly is not None:
            # a polygon has as many edges as vertices
            row.update({"polygon_faces": poly.mean, "polygon_stderr": poly.stderr})
        rows.append(row)
    return rows


def cmd_verify(args):
    _need_seed(args)
    budget = acceptance.Budget(samples=args.samples, seed=args.seed, threads=args.threads, tol=args.tol)
    only = args.only
    if only is not None and not set(only) <= set(acceptance.CHECKS):
        raise UsageError(f"unknown check numbers: {sorted(set(only) - set(acceptance.CHECKS))}")
    results = []
    for k in (sorted(acceptance.CHECKS) if only is None else sorted(only)):
        res = acceptance.run_check(k, budget)
        print(res.line(), file=sys.stderr, flush=True)
        results.append(res)
    failed = [r.number for r in results if not r.passed]
    report = {"passed": not failed, "failed": failed, "quick": budget.quick, "nsigma": budget.nsigma,
              "seed": budget.seed, "checks": [r.as_dict() for r in results]}
    _emit(_json_value(report) + "\n", args.out)
    return 1 if failed else 0


COMMANDS = {"angle": cmd_angle, "iv": cmd_iv, "absorption": cmd_absorption, "sections": cmd_sections}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if not (args.tol > 0 and math.isfinite(args.tol)):
            raise UsageError("--tol must be positive")
        if args.threads is not None and args.threads < 1:
            raise UsageError("--threads must be at least 1")
        args.threads = args.threads or default_threads()
        if args.command == "verify":
            return cmd_verify(args)
        rows = COMMANDS[args.command](args)
    except (UsageError, ParameterError) as exc:
        print(f"conic-geom {args.command}: error: {exc}", file=sys.stderr)
        return 2
    _emit(render([{k: _num(v) if not isinstance(v, str) else v for k, v in r.items()} for r in rows],
                 args.format), args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
