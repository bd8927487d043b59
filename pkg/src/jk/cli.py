"""Command-line front end: compute J-coefficients and series, descendant
series, and run the verification harnesses, with deterministic output.

Exit codes: 0 success or verification pass, 1 verification fail, 2 usage
error, 3 internal invariant violation.
"""

import argparse
import json
import sys

from . import jfunctions as jf
from . import verify as vf
from .algebra import (
    InvariantViolationError,
    ParseError,
    PoleAtQZeroError,
    RationalExpression,
    SeriesCoefficientError,
)
from .localization import (
    descendant_series,
    gamma_det_s_dual,
    gamma_line_dual_power,
)
from .spaces import SpaceDescriptor, SpaceError


def parse_space(text):
    """Space syntax: p:n | gr:r,n | fl:m1,...,ml:n | lfl:n | bd:n."""
    kind, _, rest = text.partition(":")
    try:
        if kind == "p":
            return SpaceDescriptor.projective(int(rest))
        if kind == "gr":
            r, n = (int(x) for x in rest.split(","))
            return SpaceDescriptor.grassmannian(r, n)
        if kind == "fl":
            dims_text, _, n_text = rest.rpartition(":")
            dims = tuple(int(x) for x in dims_text.split(","))
            return SpaceDescriptor.flag(dims, int(n_text))
        if kind == "lfl":
            return SpaceDescriptor.lagrangian_flag(int(rest))
        if kind == "bd":
            return SpaceDescriptor.bd_flag(int(rest))
    except ValueError:
        raise SpaceError("malformed space %r" % text)
    raise SpaceError("unknown space kind in %r" % text)


def _int_tuple(text):
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(
            "expected comma-separated integers, got %r" % text)


def _nonneg(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected an integer, got %r" % text)
    if v < 0:
        raise argparse.ArgumentTypeError("expected a nonnegative integer")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--out", default=None,
                        help="write output to a file instead of stdout")

    parser = argparse.ArgumentParser(
        prog="jk",
        description="Exact J-function coefficients, descendant series, "
                    "and identity verification.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("projective", parents=[common],
                       help="coefficients for a projective space")
    p.add_argument("--n", type=int, required=True,
                   help="ambient dimension (the space has dimension n-1)")
    p.add_argument("--d", type=_nonneg, default=None)
    p.add_argument("--cap", type=_nonneg, default=None)

    g = sub.add_parser("grassmannian", parents=[common],
                       help="coefficients for a Grassmannian")
    g.add_argument("--r", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--d", type=_nonneg, default=None)
    g.add_argument("--cap", type=_nonneg, default=None)
    g.add_argument("--form", choices=("invariant", "literal", "structured"),
                   default="invariant")

    f = sub.add_parser("flag", parents=[common],
                       help="coefficients for a partial flag variety")
    f.add_argument("--dims", type=_int_tuple, required=True)
    f.add_argument("--n", type=int, required=True)
    f.add_argument("--d", type=_int_tuple, default=None)
    f.add_argument("--cap", type=_int_tuple, default=None)
    f.add_argument("--form",
                   choices=("canonical", "literal", "theorem_ratio"),
                   default="canonical")

    pr = sub.add_parser("product", parents=[common],
                        help="coefficients for a product of spaces")
    pr.add_argument("--factor", action="append", required=True,
                    metavar="SPACE", help="repeatable, e.g. --factor p:2")
    pr.add_argument("--d", type=_int_tuple, default=None)
    pr.add_argument("--cap", type=_int_tuple, default=None)

    for name, help_text in (("conjecture-c",
                             "conjectural Lagrangian complete-flag series"),
                            ("conjecture-bd",
                             "conjectural orthogonal complete-flag series")):
        c = sub.add_parser(name, parents=[common], help=help_text)
        c.add_argument("--n", type=int, required=True)
        c.add_argument("--d", type=_nonneg, default=None)
        c.add_argument("--cap", type=_nonneg, default=None)

    ch = sub.add_parser("chi", parents=[common],
                        help="descendant series of a degree-d coefficient")
    ch.add_argument("--space", required=True,
                    help="p:n or gr:r,n")
    ch.add_argument("--d", type=_int_tuple, required=True)
    ch.add_argument("--order", type=_nonneg, default=0)
    ch.add_argument("--gamma", default="1",
                    help="1, detSdual, or Ldual:k")

    v = sub.add_parser("verify", help="run an identity verification harness")
    vsub = v.add_subparsers(dest="identity", required=True)

    va = vsub.add_parser("abelian-nonabelian", parents=[common])
    va.add_argument("--r", type=int, required=True)
    va.add_argument("--n", type=int, required=True)
    va.add_argument("--d", type=_nonneg, default=None)
    va.add_argument("--max-d", type=_nonneg, default=None)
    va.add_argument("--mode", choices=("strict", "unit-tolerant"),
                    default="unit-tolerant")
    va.add_argument("--timings", action="store_true")

    vm = vsub.add_parser("multiplicativity", parents=[common])
    vm.add_argument("--n", type=int, required=True)
    vm.add_argument("--r", type=int, required=True)
    vm.add_argument("--cap", type=_int_tuple, default=None)
    vm.add_argument("--timings", action="store_true")

    vr = vsub.add_parser("reduction", parents=[common])
    vr.add_argument("--r", type=int, required=True)
    vr.add_argument("--n", type=int, required=True)
    vr.add_argument("--max-d", type=_nonneg, required=True)
    vr.add_argument("--timings", action="store_true")

    vt = vsub.add_parser("route", parents=[common])
    vt.add_argument("--r", type=int, required=True)
    vt.add_argument("--n", type=int, required=True)
    vt.add_argument("--d", type=_nonneg, default=None)
    vt.add_argument("--max-d", type=_nonneg, default=None)
    vt.add_argument("--timings", action="store_true")

    vw = vsub.add_parser("weyl", parents=[common])
    vw.add_argument("--r", type=int, required=True)
    vw.add_argument("--n", type=int, required=True)
    vw.add_argument("--timings", action="store_true")

    vq = vsub.add_parser("qregular", parents=[common])
    vq.add_argument("--timings", action="store_true")

    return parser


def _pick_degree(args):
    if (args.d is None) == (args.cap is None):
        raise SpaceError("exactly one of --d and --cap is required")


def _coefficient_output(coeff, fmt):
    if fmt == "json":
        return json.dumps(coeff.json_obj(), indent=2)
    return coeff.text()


def _series_output(series, fmt):
    if fmt == "json":
        return json.dumps(series.json_obj(), indent=2)
    return series.text()


def cmd_projective(args):
    _pick_degree(args)
    if args.d is not None:
        return 0, _coefficient_output(jf.projective_j(args.n, args.d),
                                      args.format)
    space = SpaceDescriptor.projective(args.n)
    return 0, _series_output(jf.j_series(space, (args.cap,)), args.format)


def cmd_grassmannian(args):
    _pick_degree(args)
    space = SpaceDescriptor.grassmannian(args.r, args.n)
    if args.form == "structured":
        if args.d is not None:
            coeff = jf.grassmannian_j_structured(args.r, args.n, args.d)
            return 0, _coefficient_output(coeff, args.format)
        coeffs = [((d,), jf.grassmannian_j_structured(args.r, args.n, d))
                  for d in range(args.cap + 1)]
        series = jf.JSeries(space, (args.cap,), coeffs)
        return 0, _series_output(series, args.format)
    if args.d is not None:
        coeff = jf.grassmannian_j(args.r, args.n, args.d, args.form)
        return 0, _coefficient_output(coeff, args.format)
    series = jf.j_series(space, (args.cap,), form=args.form)
    return 0, _series_output(series, args.format)


def cmd_flag(args):
    _pick_degree(args)
    space = SpaceDescriptor.flag(args.dims, args.n)
    if args.d is not None:
        coeff = jf.flag_j(args.dims, args.n, args.d, args.form)
        return 0, _coefficient_output(coeff, args.format)
    series = jf.j_series(space, args.cap, form=args.form)
    return 0, _series_output(series, args.format)


def cmd_product(args):
    _pick_degree(args)
    factors = [parse_space(text) for text in args.factor]
    if args.d is not None:
        return 0, _coefficient_output(jf.product_j(factors, args.d),
                                      args.format)
    space = SpaceDescriptor.product(factors)
    return 0, _series_output(jf.j_series(space, args.cap), args.format)


def cmd_conjecture(args, family):
    _pick_degree(args)
    builder = (jf.lagrangian_flag_j_conjecture if family == "c"
               else jf.bd_flag_j_conjecture)
    if args.d is not None:
        return 0, _coefficient_output(builder(args.n, args.d), args.format)
    space = (SpaceDescriptor.lagrangian_flag(args.n) if family == "c"
             else SpaceDescriptor.bd_flag(args.n))
    return 0, _series_output(jf.j_series(space, (args.cap,)), args.format)


def _parse_gamma(space, text):
    if text == "1":
        return None
    if text == "detSdual":
        return gamma_det_s_dual(space)
    if text.startswith("Ldual:"):
        try:
            k = int(text[len("Ldual:"):])
        except ValueError:
            raise SpaceError("malformed gamma %r" % text)
        return gamma_line_dual_power(space, k)
    raise SpaceError("unknown gamma %r" % text)


def cmd_chi(args):
    space = parse_space(args.space)
    gamma = _parse_gamma(space, args.gamma)
    chi = descendant_series(space, args.d, gamma=gamma, order=args.order)
    if args.format == "json":
        obj = {
            "space": space.json_obj(),
            "degree": list(args.d),
            "gamma": args.gamma,
            "order": args.order,
            "series": RationalExpression(chi).json_obj(),
        }
        return 0, json.dumps(obj, indent=2)
    return 0, chi.text()


def _degree_range(args):
    if args.d is not None and args.max_d is not None:
        raise SpaceError("give only one of --d and --max-d")
    if args.d is not None:
        return [args.d]
    if args.max_d is not None:
        return list(range(args.max_d + 1))
    raise SpaceError("one of --d and --max-d is required")


def _reports_output(reports, args):
    timings = getattr(args, "timings", False)
    if args.format == "json":
        objs = [r.json_obj(timings=timings) for r in reports]
        text = json.dumps(objs[0] if len(objs) == 1 else objs, indent=2)
    else:
        text = "\n\n".join(r.text(timings=timings) for r in reports)
    code = 0 if all(r.passed() for r in reports) else 1
    return code, text


def cmd_verify(args):
    if args.identity == "abelian-nonabelian":
        mode = args.mode.replace("-", "_")
        reports = [vf.abelian_nonabelian_check(args.r, args.n, d, mode)
                   for d in _degree_range(args)]
    elif args.identity == "multiplicativity":
        cap = args.cap if args.cap is not None else (2,) * args.r
        reports = [vf.multiplicativity_check(args.n, args.r, cap)]
    elif args.identity == "reduction":
        reports = [vf.reduction_check(args.r, args.n, args.max_d)]
    elif args.identity == "route":
        reports = [vf.route_check(args.r, args.n, d)
                   for d in _degree_range(args)]
    elif args.identity == "weyl":
        reports = [vf.weyl_check(args.r, args.n)]
    else:
        reports = [vf.qregular_check()]
    return _reports_output(reports, args)


def dispatch(args):
    if args.command == "projective":
        return cmd_projective(args)
    if args.command == "grassmannian":
        return cmd_grassmannian(args)
    if args.command == "flag":
        return cmd_flag(args)
    if args.command == "product":
        return cmd_product(args)
    if args.command == "conjecture-c":
        return cmd_conjecture(args, "c")
    if args.command == "conjecture-bd":
        return cmd_conjecture(args, "bd")
    if args.command == "chi":
        return cmd_chi(args)
    return cmd_verify(args)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code, text = dispatch(args)
    except (InvariantViolationError, PoleAtQZeroError,
            SeriesCoefficientError) as exc:
        sys.stderr.write("invariant violation: %s\n" % exc)
        return 3
    except (SpaceError, ParseError, ValueError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 2
    if args.out is not None:
        with open(args.out, "w") as handle:
            handle.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
