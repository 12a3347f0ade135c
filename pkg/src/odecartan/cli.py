"""Command-line front end.

    odecartan analyze --ode "3/2*q^2/p" --stages all --format json

Exit codes: 0 when every requested verdict holds, 1 when the pipeline ran
but some verdict is false, 2 on input or precondition errors.
"""

import argparse
import json
import sys

from .errors import OdeCartanError
from .report import AnalysisInputError, AnalysisRequest, analyze, emit_report


def build_parser():
    parser = argparse.ArgumentParser(
        prog="odecartan",
        description="Exact symbolic analysis of third-order ODEs under "
        "fiber-preserving equivalence.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    an = sub.add_parser(
        "analyze",
        help="run the pipeline on one right-hand side F(x,y,p,q)",
    )
    an.add_argument("--ode", required=True, help='right-hand side, e.g. "3/2*q^2/p"')
    an.add_argument(
        "--opaque",
        action="append",
        default=[],
        metavar="NAME:ARGS",
        help="declare an opaque function, e.g. A:x,y (repeatable)",
    )
    an.add_argument(
        "--stages",
        default="inv,cond",
        help="comma list from inv,cond,metric,einstein,petrov,conn,appendix or 'all'",
    )
    an.add_argument(
        "--specialize",
        action="append",
        default=[],
        metavar="NAME=EXPR",
        help='rational specialization for Petrov sampling, e.g. A="x*y" (repeatable)',
    )
    an.add_argument("--points", type=int, default=5, help="Petrov sample points")
    an.add_argument("--seed", type=int, default=0, help="sample-point RNG seed")
    an.add_argument("--format", choices=("json", "text"), default="json")
    an.add_argument("--out", default=None, help="write the report to FILE instead of stdout")
    return parser


def _parse_opaque(items):
    out = {}
    for item in items:
        name, sep, args = item.partition(":")
        if not sep or not name or not args:
            raise AnalysisInputError(
                "bad-opaque", f"expected NAME:ARG,ARG...  got {item!r}"
            )
        out[name.strip()] = tuple(a.strip() for a in args.split(",") if a.strip())
    return out


def _parse_specializations(items):
    out = {}
    for item in items:
        name, sep, expr = item.partition("=")
        if not sep or not name:
            raise AnalysisInputError("bad-specialization", f"expected NAME=EXPR, got {item!r}")
        out[name.strip()] = expr.strip()
    return out


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        request = AnalysisRequest(
            ode=args.ode,
            opaque=_parse_opaque(args.opaque),
            stages=tuple(s for s in args.stages.split(",") if s.strip()),
            specializations=_parse_specializations(args.specialize),
            points=args.points,
            seed=args.seed,
        )
        request.normalized_stages()  # validate stage names up front
        report = analyze(request)
        document = emit_report(report, args.format)
    except (AnalysisInputError, OdeCartanError) as exc:
        payload = {"error": {"code": getattr(exc, "code", "input-error"), "message": str(exc)}}
        sys.stderr.write(json.dumps(payload) + "\n")
        return 2
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(document)
    else:
        sys.stdout.write(document)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
