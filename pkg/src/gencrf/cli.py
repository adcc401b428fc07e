"""Command line front end.

    gencrf check <path|catalog:name> [--checks a,b,c] [--samples N] [--seed S] [--tol T]
                 [--report text|json] [--timing]
    gencrf catalog list
    gencrf catalog run <name> [--samples N]
    gencrf export <catalog:name> <path>

Exit codes: 0 all checks pass, 1 some check fails, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from . import catalog
from .checks import run_checks
from .definition import CHECK_NAMES, Definition, DefinitionError, load_definition

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _resolve(source: str) -> Definition:
    if source.startswith("catalog:"):
        name = source[len("catalog:"):]
        try:
            fx = catalog.get(name)
        except KeyError as exc:
            raise InputError(exc.args[0]) from exc
        d = fx.definition
        if not d.checks:
            d = d.with_settings(checks=tuple(c for c in fx.expected if c in CHECK_NAMES))
        return d
    return load_definition(source)


def _parse_checks(text: Optional[str]) -> Optional[List[str]]:
    if text is None:
        return None
    names = [c.strip() for c in text.split(",") if c.strip()]
    unknown = [c for c in names if c not in CHECK_NAMES]
    if unknown:
        raise InputError(f"unknown check(s): {', '.join(unknown)}; known: {', '.join(CHECK_NAMES)}")
    return names


def cmd_check(args) -> int:
    d = _resolve(args.source)
    if args.samples is not None and args.samples < 1:
        raise InputError("--samples must be at least 1")
    if args.tol is not None and not args.tol > 0:
        raise InputError("--tol must be positive")
    if args.seed is not None and not 0 <= args.seed < 2**64:
        raise InputError("--seed must be a 64-bit unsigned integer")
    d = d.with_settings(samples=args.samples, seed=args.seed, tol=args.tol)
    names = _parse_checks(args.checks) or list(d.checks)
    if not names:
        raise InputError("no checks requested (use --checks or a 'checks' list in the input)")
    reports = run_checks(d, names)
    if args.report == "json":
        sys.stdout.write(json.dumps([r.to_json(timing=args.timing) for r in reports], indent=2) + "\n")
    else:
        for r in reports:
            line = r.line()
            if args.timing:
                line += f" ({r.millis:.1f} ms)"
            print(line)
        print(f"{sum(r.passed for r in reports)}/{len(reports)} checks passed")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_catalog_list(args) -> int:
    for name in catalog.names():
        print(f"{name:24s} {catalog.get(name).description}")
    return EXIT_OK


def cmd_catalog_run(args) -> int:
    """Run a fixture's expected checks; exit 0 iff every verdict matches its expectation."""
    try:
        results = catalog.run(args.name, samples=args.samples)
    except KeyError as exc:
        raise InputError(exc.args[0]) from exc
    ok = True
    for rep, expected in results:
        match = rep.passed == expected
        ok &= match
        tag = "ok" if match else "UNEXPECTED"
        print(f"{tag:10s} {rep.line()} (expected {'pass' if expected else 'fail'})")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_export(args) -> int:
    if not args.source.startswith("catalog:"):
        raise InputError("export takes a catalog:<name> source")
    name = args.source[len("catalog:"):]
    try:
        text = catalog.export(name)
    except KeyError as exc:
        raise InputError(exc.args[0]) from exc
    try:
        with open(args.path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"cannot write {args.path}: {exc.strerror}") from exc
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gencrf", description="Verify generalized CRF-type structures.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="run checks on a JSON definition or a catalog fixture")
    c.add_argument("source", help="path to a JSON definition, or catalog:<name>")
    c.add_argument("--checks", help="comma separated check names: " + ",".join(CHECK_NAMES))
    c.add_argument("--samples", type=int, help="number of sample points (default 200)")
    c.add_argument("--seed", type=int, help="sampling seed (default 42)")
    c.add_argument("--tol", type=float, help="residual tolerance (default 1e-9)")
    c.add_argument("--report", choices=("text", "json"), default="text")
    c.add_argument("--timing", action="store_true", help="include wall times (json: millis)")
    c.set_defaults(func=cmd_check)

    cat = sub.add_parser("catalog", help="built-in fixtures")
    csub = cat.add_subparsers(dest="catalog_command", required=True)
    cl = csub.add_parser("list", help="list fixture names")
    cl.set_defaults(func=cmd_catalog_list)
    cr = csub.add_parser("run", help="run a fixture against its expected verdicts")
    cr.add_argument("name")
    cr.add_argument("--samples", type=int)
    cr.set_defaults(func=cmd_catalog_run)

    e = sub.add_parser("export", help="write a fixture as a JSON definition")
    e.add_argument("source", help="catalog:<name>")
    e.add_argument("path")
    e.set_defaults(func=cmd_export)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors, which matches the input-error code
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except (InputError, DefinitionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
