"""Command-line front end.

Exit codes: 0 success, 1 verification mismatch, 2 usage error,
3 partial certification, 4 I/O or network failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .algebra import DEFAULT_ENUMERATION_CAP, AlgebraError, EnumerationCapExceeded, RingSpecError, parse_ring
from .certify import DEFAULT_MAX_DEGREE, FormulaFalsified, GeneratorConfig, certify
from .checks import run_all
from .formula import MAX_K
from .subgroup import span_J, span_K
from .tables import (
    SEQUENCE_COLUMNS,
    BFileError,
    build_rows,
    bundled_bfile,
    compare_fixture,
    compare_oeis,
    fetch_bfile,
    load_bfile,
    load_fixture,
    normalize_id,
    render,
)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_PARTIAL = 3
EXIT_IO = 4

LEGACY_BANNER = (
    "*** LEGACY 1976 FORMULA: alpha_k(2) = 2 whenever some 2^j - 1 (j >= 2) divides k.\n"
    "*** This rule is wrong (first at k = 14); output shown for comparison only."
)

log = logging.getLogger("mkwaring")


class UsageError(Exception):
    pass


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mkwaring", description="Compute and certify m(k).")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="JSON file of default option values (flags override)")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="print a(k), b(k), m(k)/k, m(k)")
    p.add_argument("k", type=_positive_int)
    p.add_argument("k_to", type=_positive_int, nargs="?", help="end of an inclusive range")
    p.add_argument("--legacy-1976", action="store_true", help="use the erroneous 1976 rule for alpha_k(2)")
    p.add_argument("--json", action="store_true", help="emit JSON")

    p = sub.add_parser("table", help="generate the table and optionally cross-check it")
    p.add_argument("--from", dest="k_from", type=_positive_int, default=1)
    p.add_argument("--to", dest="k_to", type=_positive_int, default=150)
    p.add_argument("--format", choices=("csv", "json", "markdown"))
    p.add_argument("--output", "-o", help="write the rendered table here")
    p.add_argument("--check-fixture", action="store_true", help="compare with the published table")
    p.add_argument("--oeis", action="append", default=[], metavar="A-NUMBER",
                   help="compare with a b-file (bundled unless --fetch or --bfile)")
    p.add_argument("--bfile", action="append", default=[], metavar="PATH", help="compare with a local b-file")
    p.add_argument("--fetch", action="store_true", help="download b-files (network)")
    p.add_argument("--legacy-1976", action="store_true")

    p = sub.add_parser("certify", help="build upper and lower certificates for m(k)")
    p.add_argument("k", type=_positive_int)
    p.add_argument("--json", dest="json_out", metavar="PATH", help="write the bundle as JSON ('-' for stdout)")
    p.add_argument("--max-ring-size", type=_positive_int, default=DEFAULT_ENUMERATION_CAP)
    p.add_argument("--gen-a", type=_positive_int, default=2, help="largest leading coefficient of linear generators")
    p.add_argument("--gen-b", type=int, default=None, help="largest |constant| of linear generators (default k)")
    p.add_argument("--max-degree", type=_positive_int, default=DEFAULT_MAX_DEGREE,
                   help="highest generator degree tried when escalating")

    p = sub.add_parser("oracle", help="compute J(k,R) or K(k,R) for a finite ring")
    p.add_argument("--ring", required=True, help='e.g. "Z/8[x]/(x^2+x+1)" or "GF(2^4)"')
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--kind", choices=("J", "K"), default="J")
    p.add_argument("--max-ring-size", type=_positive_int, default=DEFAULT_ENUMERATION_CAP)

    p = sub.add_parser("selftest", help="run the built-in invariant sweeps")
    p.add_argument("--max-ring-size", type=_positive_int, default=DEFAULT_ENUMERATION_CAP)
    p.add_argument("--legacy-1976", action="store_true", help="force the legacy formula (should fail)")
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str], path: str) -> argparse.Namespace:
    try:
        cfg = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise UsageError(f"config {path} must be a JSON object")
    first = parser.parse_args(argv)
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))

    def names(sp):
        # config keys may be spelled like the flag ("max-ring-size", "from") or like its dest
        out = {}
        for a in sp._actions:
            out[a.dest] = a.dest
            for opt in a.option_strings:
                out[opt.lstrip("-").replace("-", "_")] = a.dest
        return out

    sp = subparsers.choices[first.command]
    known = names(sp)
    all_known = set().union(*(names(s) for s in subparsers.choices.values()))
    values = {k.replace("-", "_"): v for k, v in cfg.items() if not isinstance(v, dict)}
    section = cfg.get(first.command, {})
    values.update({k.replace("-", "_"): v for k, v in section.items()})
    unknown = sorted(set(values) - all_known)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    sp.set_defaults(**{known[k]: v for k, v in values.items() if k in known})
    return parser.parse_args(argv)


# ---------------------------------------------------------------------------
# commands


def cmd_compute(args) -> int:
    k_to = args.k_to if args.k_to is not None else args.k
    if k_to < args.k:
        raise UsageError(f"empty range {args.k}..{k_to}")
    if k_to > MAX_K:
        raise UsageError(f"k must be <= {MAX_K}")
    if args.legacy_1976:
        print(LEGACY_BANNER, file=sys.stderr)
    rows = build_rows(args.k, k_to, legacy=args.legacy_1976)
    if args.json:
        out = [{"k": r.k, "a": str(r.a), "b": str(r.b), "m_over_k": str(r.m_over_k), "m": str(r.m),
                "legacy_1976": args.legacy_1976} for r in rows]
        print(json.dumps(out if len(out) > 1 else out[0], indent=2))
        return EXIT_OK
    for r in rows:
        tag = "  [legacy-1976]" if args.legacy_1976 else ""
        print(f"k={r.k}  a(k)={r.a_factored}  b(k)={r.b_factored}  m(k)/k={r.m_over_k}  m={r.m}{tag}")
    return EXIT_OK


def _compare(rows, bf):
    try:
        return compare_oeis(rows, bf)
    except (KeyError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def cmd_table(args) -> int:
    if args.k_to < args.k_from:
        raise UsageError(f"--from {args.k_from} is greater than --to {args.k_to}")
    if args.k_to > MAX_K:
        raise UsageError(f"--to must be <= {MAX_K}")
    if args.legacy_1976:
        print(LEGACY_BANNER, file=sys.stderr)
    rows = build_rows(args.k_from, args.k_to, legacy=args.legacy_1976)
    checking = args.check_fixture or args.oeis or args.bfile
    if args.output or args.format or not checking:
        text = render(rows, args.format or "csv")
        if args.output:
            Path(args.output).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
    report_stream = sys.stderr if (not args.output and (args.format or not checking)) else sys.stdout

    reports = []
    if args.check_fixture:
        fixture = {k: v for k, v in load_fixture().items() if args.k_from <= k <= args.k_to}
        reports.append(compare_fixture(rows, fixture))
    for seq in args.oeis:
        try:
            seq = normalize_id(seq)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        if seq not in SEQUENCE_COLUMNS:
            raise UsageError(f"{seq} is not one of {', '.join(SEQUENCE_COLUMNS)}")
        bf = fetch_bfile(seq) if args.fetch else bundled_bfile(seq)
        reports.append(_compare(rows, bf))
    for path in args.bfile:
        bf = load_bfile(path)
        if not bf.sequence_id:
            raise UsageError(f"cannot tell which sequence {path} holds; name it b<number>.txt")
        reports.append(_compare(rows, bf))
    for rep in reports:
        for line in rep.lines():
            print(line, file=report_stream)
    return EXIT_OK if all(r.ok for r in reports) else EXIT_MISMATCH


def cmd_certify(args) -> int:
    config = GeneratorConfig(max_a=args.gen_a, max_b=args.gen_b)
    try:
        bundle = certify(args.k, cap=args.max_ring_size, config=config, max_degree=args.max_degree)
    except FormulaFalsified as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_MISMATCH
    if args.json_out == "-":
        print(bundle.to_json())
    else:
        if args.json_out:
            Path(args.json_out).write_text(bundle.to_json() + "\n", encoding="utf-8")
        print(f"k={bundle.k}  m(k)={bundle.m_formula}  status={bundle.status}")
        print(f"  upper: {bundle.upper.m}x + ({bundle.upper.c}) from {len(bundle.upper.terms)} terms "
              f"[{bundle.upper.source}]")
        for w in bundle.witnesses:
            ring = w.ring.spec if w.ring is not None else "-"
            mark = "ok" if w.success else "MISSING"
            print(f"  p={w.p}: v_p target {w.target_valuation}, achieved {w.achieved_valuation} "
                  f"via {ring} ({w.method}) {mark}")
        if bundle.uncertified:
            print(f"  uncertified primes: {', '.join(map(str, bundle.uncertified))}")
    return EXIT_OK if bundle.status == "FULL" else EXIT_PARTIAL


def cmd_oracle(args) -> int:
    try:
        ring = parse_ring(args.ring)
    except RingSpecError as exc:
        raise UsageError(str(exc)) from exc
    if args.kind == "K" and ring.q != 2:
        raise UsageError("--kind K needs a ring with coefficient modulus 2")
    if args.kind == "J":
        report = span_J(ring, args.k, args.max_ring_size)
    else:
        report = span_K(ring, args.k, args.max_ring_size)
    print(report.to_json())
    return EXIT_OK


def cmd_selftest(args) -> int:
    results = run_all(cap=args.max_ring_size, legacy=args.legacy_1976)
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.ok for r in results) else EXIT_MISMATCH


COMMANDS = {
    "compute": cmd_compute,
    "table": cmd_table,
    "certify": cmd_certify,
    "oracle": cmd_oracle,
    "selftest": cmd_selftest,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.config:
            args = _apply_config(parser, argv, args.config)
        logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")
        return COMMANDS[args.command](args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"mkwaring: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EnumerationCapExceeded as exc:
        print(f"mkwaring: {exc}", file=sys.stderr)
        return EXIT_IO
    except (OSError, BFileError) as exc:
        print(f"mkwaring: {exc}", file=sys.stderr)
        return EXIT_IO
    except AlgebraError as exc:
        print(f"mkwaring: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
