"""Command line entry point: ``polykern {verify, eval, classify, witness}``.

Exit codes: 0 success, 1 a check failed, 2 a hypothesis/guard violation,
3 a configuration error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from . import analysis as an
from . import multiindex as mi
from .errors import ConfigError, GuardError, PolykernError
from .kernels import kernel_canonical, normalized_kernel
from .report import SUITES, emit_report, load_config, run_suite
from .serialize import dumps, kernel_to_json

EXIT_OK, EXIT_FAIL, EXIT_GUARD, EXIT_CONFIG = 0, 1, 2, 3


def _point(text):
    try:
        return np.array([complex(s.replace(" ", "")) for s in text.split(",")])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated complex numbers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polykern", description="Quasi-invariant kernels on the polydisc.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a verification suite and write a report")
    v.add_argument("--config", required=True)
    v.add_argument("--suite", default="all", choices=SUITES + ("all",))
    v.add_argument("--out", help="report path (default: stdout)")
    v.add_argument("--format", default="json", choices=("json", "csv-summary"))
    v.add_argument("--seed", type=int)
    v.add_argument("--samples", type=int)
    v.add_argument("--degree", type=int, help="degree cutoff N of the truncated model")
    v.add_argument("--taylor-order", type=int, help="coefficient order for the commutant")
    v.add_argument("--radius", type=float, help="Cauchy circle radius")
    v.add_argument("--nodes", type=int, help="Cauchy nodes per axis")
    v.add_argument("--workers", type=int, default=4)
    v.add_argument("--timings", action="store_true", help="include wall times (makes the report non-reproducible)")

    e = sub.add_parser("eval", help="print K(z, w) as JSON")
    e.add_argument("--config", required=True)
    e.add_argument("--z", required=True, type=_point, help="e.g. 0.1+0.2j,0.3")
    e.add_argument("--w", required=True, type=_point)
    e.add_argument("--normalized", action="store_true")

    c = sub.add_parser("classify", help="decide unitary equivalence of two parameter sets")
    c.add_argument("--config1", required=True)
    c.add_argument("--config2", required=True)

    w = sub.add_parser("witness", help="mixed-curvature witness for a multi-index")
    w.add_argument("--alpha", required=True, help="e.g. 2,0")
    return parser


def _verify(args, out):
    overrides = {
        "seed": args.seed,
        "samples": args.samples,
        "degree": args.degree,
        "taylor_order": args.taylor_order,
        "quadrature": {"radius": args.radius, "nodes": args.nodes},
    }
    cfg = load_config(args.config, overrides)
    report = run_suite(cfg, args.suite, args.workers)
    text = emit_report(report, args.format, args.out, args.timings)
    if args.out is None:
        out.write(text)
    return report.exit_code


def _eval(args, out):
    p = load_config(args.config).params
    for name, pt in (("z", args.z), ("w", args.w)):
        if pt.size != p.n:
            raise ConfigError(f"--{name}", f"expected {p.n} coordinates, got {pt.size}")
        if np.any(np.abs(pt) >= 1):
            raise ConfigError(f"--{name}", "point must lie in the open polydisc")
    fn = normalized_kernel if args.normalized else kernel_canonical
    out.write(dumps(kernel_to_json(fn(p, args.z, args.w))))
    return EXIT_OK


def _classify(args, out):
    p1, p2 = load_config(args.config1).params, load_config(args.config2).params
    out.write(dumps(an.classify_pair(p1, p2).to_json()))
    return EXIT_OK


def _witness(args, out):
    try:
        alpha = mi.parse_multiindex(args.alpha)
    except (ValueError, PolykernError) as exc:
        raise ConfigError("--alpha", str(exc)) from exc
    w = an.inequivalence_witness(alpha)
    out.write(dumps({"alpha": list(alpha), **w.to_json(), "holds": an.witness_holds(mi.index_family(alpha), w)}))
    return EXIT_OK


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    handler = {"verify": _verify, "eval": _eval, "classify": _classify, "witness": _witness}[args.command]
    try:
        return handler(args, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GuardError as exc:
        print(f"hypothesis violated: {exc}", file=sys.stderr)
        return EXIT_GUARD


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
