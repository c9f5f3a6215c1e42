"""Command line entry point: ``orient-rr run`` and ``orient-rr check``."""
from __future__ import annotations

import argparse
import sys

from .. import __version__
from ..errors import EngineError, InternalInconsistencyError
from ..fgl import DEFAULT_ORDER, theory as make_theory
from .parser import SUITE_NAMES, ScriptError, format_script, parse
from .runner import (
    EXIT_FAIL,
    EXIT_INTERNAL,
    EXIT_OK,
    EXIT_USAGE,
    Runner,
    dumps,
    run_suites,
    text_lines,
    worker_count,
)

CHECKS = ("fgl", "pbf", "thom", "whitney", "duality", "section", "projection",
          "functoriality", "excess", "grr", "hrr", "all")


def _theory_arg(s):
    try:
        make_theory(s, 1)
    except EngineError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return s


def _positive(s):
    try:
        n = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {s!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return n


def build_parser():
    p = argparse.ArgumentParser(prog="orient-rr",
                                description="Exact Riemann-Roch verification for oriented theories.")
    p.add_argument("--version", action="version", version=f"orient-rr {__version__}")
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp):
        sp.add_argument("--theory", type=_theory_arg, default=None,
                        help="additive, multiplicative or universal:k")
        sp.add_argument("--truncation", "--order", dest="truncation", type=_positive,
                        default=DEFAULT_ORDER,
                        help="series truncation order (default %(default)s)")

    r = sub.add_parser("run", help="run a script (file path, or - for stdin)")
    r.add_argument("script", nargs="?", default="-")
    common(r)
    r.add_argument("--json", action="store_true", help="print a JSON report")

    f = sub.add_parser("fmt", help="print a script in canonical form")
    f.add_argument("script", nargs="?", default="-")

    c = sub.add_parser("check", help="run a verification suite")
    c.add_argument("name", choices=CHECKS + tuple(s for s in SUITE_NAMES if s not in CHECKS))
    common(c)
    c.add_argument("--max-dim", type=_positive, default=3, dest="max_dim",
                   help="sweep bound (default %(default)s)")
    g = c.add_mutually_exclusive_group()
    g.add_argument("--json", dest="json", action="store_true", default=True)
    g.add_argument("--text", dest="json", action="store_false")
    return p


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _parse_error(exc: ScriptError, as_json: bool):
    if as_json:
        sys.stdout.write(dumps({"version": __version__, "error": exc.as_dict()}))
    else:
        sys.stderr.write(f"error[{exc.code}] line {exc.line}, column {exc.column}: {exc.message}\n")
    return EXIT_USAGE


def cmd_run(args) -> int:
    try:
        text = _read(args.script)
    except OSError as exc:
        sys.stderr.write(f"orient-rr: {exc}\n")
        return EXIT_USAGE
    theory = args.theory or "additive"
    try:
        script = parse(text, theory)
    except ScriptError as exc:
        return _parse_error(exc, args.json)
    runner = Runner(theory, args.truncation)
    runner.run(script)
    if args.json:
        sys.stdout.write(dumps(runner.report()))
    else:
        sys.stdout.write(text_lines(runner.results))
    return runner.exit_code()


def cmd_fmt(args) -> int:
    try:
        script = parse(_read(args.script))
    except ScriptError as exc:
        return _parse_error(exc, False)
    except OSError as exc:
        sys.stderr.write(f"orient-rr: {exc}\n")
        return EXIT_USAGE
    sys.stdout.write(format_script(script))
    return EXIT_OK


def cmd_check(args) -> int:
    th = make_theory(args.theory or "multiplicative", args.truncation)
    names = [args.name] if args.name != "all" else [c for c in CHECKS if c != "all"]
    try:
        groups = run_suites(names, th, args.max_dim)
    except InternalInconsistencyError as exc:
        sys.stderr.write(f"internal inconsistency: {exc}\n")
        return EXIT_INTERNAL
    except EngineError as exc:
        groups = None
        err = exc
    results = []
    if groups is None:
        results.append({"command": f"check {args.name}", "status": "error",
                        "code": err.code, "message": str(err)})
    else:
        for name, reports in zip(names, groups):
            entry = Runner.suite_entry(reports)
            entry["command"] = f"check {name}"
            results.append(entry)
    report = {"version": __version__, "theory": th.name,
              "orientations": list(th.orientation_labels), "truncation": th.order,
              "max_dim": args.max_dim, "results": results}
    sys.stdout.write(dumps(report) if args.json else text_lines(results))
    if any(r["status"] != "pass" for r in results):
        return EXIT_FAIL
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        worker_count()
    except ValueError as exc:
        sys.stderr.write(f"orient-rr: bad ORIENT_RR_THREADS: {exc}\n")
        return EXIT_USAGE
    if args.cmd == "run":
        return cmd_run(args)
    if args.cmd == "fmt":
        return cmd_fmt(args)
    return cmd_check(args)


if __name__ == "__main__":
    sys.exit(main())
