"""Command-line entry point: frobenius-lab {run,preset,suite,trace,census}."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .curves import CurveModP, SingularCurveError, frobenius_angle, j_family, trace
from .errors import ConfigError
from .runner import EXIT_CONFIG, EXIT_HYPOTHESIS, PRESETS, load_config, preset_config, run_experiment
from .stats import MIN_PRIME, fiber_census
from .suites import SUITES, run_suite

log = logging.getLogger("frobenius_lab")


def _cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    if args.workers:
        cfg.workers = args.workers
    return run_experiment(cfg)


def _cmd_preset(args) -> int:
    try:
        cfg = preset_config(args.name, x=args.x, T=args.T, out=args.out, workers=args.workers or 1)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    return run_experiment(cfg)


def _cmd_suite(args) -> int:
    return run_suite(args.name, args.out)


def _cmd_trace(args) -> int:
    try:
        curve = CurveModP(args.p, args.A, args.B)
    except SingularCurveError as exc:
        log.error("%s", exc)
        return EXIT_HYPOTHESIS
    except ValueError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    a = trace(curve)
    print(json.dumps({"p": curve.p, "A": curve.A, "B": curve.B, "a_p": a, "angle": frobenius_angle(a, curve.p)}))
    return 0


def _cmd_census(args) -> int:
    if args.preset != "j-family":
        log.error("only the j-family census preset exists")
        return EXIT_CONFIG
    if args.p > args.cap:
        log.error("p=%d exceeds the census cap %d (raise it with --cap)", args.p, args.cap)
        return EXIT_CONFIG
    try:
        c = fiber_census(j_family(), args.p)
    except ValueError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    print("w,a")
    for w, a in zip(c.residues.tolist(), c.a.tolist()):
        print(f"{w},{a}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="frobenius-lab", description="Frobenius trace statistics over families of elliptic curves.")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run an experiment from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("preset", help="run a named experiment")
    p.add_argument("name", choices=sorted(PRESETS))
    p.add_argument("--x", type=int)
    p.add_argument("--T", type=int)
    p.add_argument("--out", default=".")
    p.add_argument("--workers", type=int)
    p.set_defaults(func=_cmd_preset)

    p = sub.add_parser("suite", help="run an acceptance suite")
    p.add_argument("name", help=f"one of {', '.join(SUITES)}")
    p.add_argument("--out", default=".")
    p.set_defaults(func=_cmd_suite)

    p = sub.add_parser("trace", help="Frobenius trace of one curve mod p")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--A", type=int, required=True)
    p.add_argument("--B", type=int, required=True)
    p.set_defaults(func=_cmd_trace)

    p = sub.add_parser("census", help="fiber census of a family mod p as CSV")
    p.add_argument("--preset", default="j-family")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--cap", type=int, default=5000, help="largest p allowed (the census is O(p^2))")
    p.set_defaults(func=_cmd_census)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else 0
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    if getattr(args, "p", None) is not None and args.command in ("trace", "census") and args.p < MIN_PRIME:
        log.error("p must be a prime >= %d", MIN_PRIME)
        return EXIT_CONFIG
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
