"""Command-line entry point.

Exit codes: 0 pass, 1 I/O failure, 2 usage, 3 conjecture violation,
4 engine disagreement.
"""

from __future__ import annotations

import argparse
import json
import logging
import statistics
import sys
import time

from . import engines as eng
from .campaign import (
    CampaignConfig,
    export_bfile,
    parse_engines,
    run_campaign,
)
from .engines import CrtMode, Engine
from .errors import CheckpointCorruption, DimensionTooLarge, EngineDisagreement, StructuralMismatch
from .explore import cofactor_profile, principal_minors
from .matrix import build_m, read_matrix, to_dense, write_matrix, dumps

EXIT_OK, EXIT_IO, EXIT_USAGE, EXIT_VIOLATION, EXIT_DISAGREE = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def _engine_list(text: str) -> list[str]:
    names = [s.strip() for s in text.split(",") if s.strip()]
    if not names:
        raise argparse.ArgumentTypeError("engine list is empty")
    for n in names:
        try:
            Engine(n)
        except ValueError:
            raise argparse.ArgumentTypeError(f"unknown engine {n!r}") from None
    return names


def _int_list(text: str) -> list[int]:
    try:
        out = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("list is empty")
    return out


def _mode(args, engines=None) -> CrtMode:
    mode = args.mode
    if mode is None:
        certifier = engines is None or {Engine.BAREISS, Engine.MODULAR_CRT} & set(engines)
        mode = "certified" if certifier else "probabilistic"
    if mode == "certified":
        return CrtMode.certified()
    return CrtMode.probabilistic(args.k, args.seed)


def _add_mode_flags(p):
    p.add_argument("--mode", choices=["certified", "probabilistic"], default=None,
                   help="CRT mode (default: certified when bareiss or modular_crt is selected)")
    p.add_argument("--k", type=int, default=eng.DEFAULT_K, help="primes in probabilistic mode (default: 5)")
    p.add_argument("--seed", type=int, default=0, help="prime sampling seed (default: 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="detconj", description="Exact determinants of the M(d) family.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write the matrix M(d)")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--out", help="output file (default: stdout)")

    p = sub.add_parser("det", help="determinant of M(d) or of a matrix file")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--d", type=int)
    src.add_argument("--in", dest="infile")
    p.add_argument("--engine", default="bareiss", choices=[e.value for e in Engine])
    _add_mode_flags(p)
    p.add_argument("--json", action="store_true", help="emit the result as JSON")

    for name, helptext in (("verify", "check det M(d) = (-1)^d for d = 1..max-d"),
                           ("campaign", "verification campaign over [d-min, d-max] with a report")):
        p = sub.add_parser(name, help=helptext)
        if name == "verify":
            p.add_argument("--max-d", type=int, required=True)
            p.add_argument("--engines", type=_engine_list, default=["modular_crt", "structural"])
        else:
            p.add_argument("--d-min", type=int, default=1)
            p.add_argument("--d-max", type=int, required=True)
            p.add_argument("--engines", type=_engine_list, default=["bareiss", "modular_crt", "structural"])
            p.add_argument("--bfile", help="also export an OEIS-style b-file")
        _add_mode_flags(p)
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--checkpoint")
        p.add_argument("--out", help="write the JSON report here")
        p.add_argument("--timings", action="store_true", help="include wall times in the JSON report")
        p.add_argument("--json", action="store_true", help="emit the JSON report on stdout")
        p.add_argument("--quiet", action="store_true", help="suppress per-d lines")

    p = sub.add_parser("explore", help="export cofactor / principal-minor data")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--row", type=int, help="expansion row (default: 2d)")
    p.add_argument("--minors", action="store_true", help="export leading principal minors instead")
    p.add_argument("--out", help="output file (default: stdout)")

    p = sub.add_parser("bench", help="time engines on M(d)")
    p.add_argument("--d", type=_int_list, default=[50, 100, 200])
    p.add_argument("--engines", type=_engine_list, default=["bareiss", "modular_crt", "structural"])
    p.add_argument("--repetitions", type=int, default=3)
    p.add_argument("--json", action="store_true")
    return parser


def _check_d(d, flag="--d"):
    if d is None or d < 1:
        raise UsageError(f"{flag} must satisfy d >= 1, got {d}")


def _emit(text: str, out: str | None):
    if out:
        with open(out, "wb") as fh:
            fh.write(text.encode("ascii"))
    else:
        sys.stdout.write(text)


def cmd_gen(args) -> int:
    _check_d(args.d)
    m = build_m(args.d)
    if args.out:
        write_matrix(m, args.out)
    else:
        sys.stdout.write(dumps(m))
    return EXIT_OK


def run_engine(name: str, m, mode: CrtMode) -> eng.DetResult:
    e = Engine(name)
    if e is Engine.LAPLACE:
        return eng.det_laplace(to_dense(m))
    if e is Engine.BAREISS:
        return eng.det_bareiss(m)
    if e is Engine.MODULAR_CRT:
        return eng.det_crt(m, mode)
    return eng.det_structural(m)


def cmd_det(args) -> int:
    if args.infile:
        m = read_matrix(args.infile)
    else:
        _check_d(args.d)
        m = build_m(args.d)
    try:
        r = run_engine(args.engine, m, _mode(args))
    except DimensionTooLarge as exc:
        raise UsageError(str(exc)) from exc
    except StructuralMismatch as exc:
        raise UsageError(f"structural engine not applicable: {exc}") from exc
    if args.json:
        obj = {
            "value": r.value,
            "engine": r.engine.value,
            "certification": r.certification.value,
            "prime_trace": None if r.prime_trace is None else [list(t) for t in r.prime_trace],
        }
        print(json.dumps(obj, sort_keys=True))
    else:
        print(r.value)
    return EXIT_OK


def cmd_campaign(args) -> int:
    if args.command == "verify":
        _check_d(args.max_d, "--max-d")
        d_min, d_max = 1, args.max_d
    else:
        _check_d(args.d_min, "--d-min")
        _check_d(args.d_max, "--d-max")
        d_min, d_max = args.d_min, args.d_max
    engines = parse_engines(args.engines)
    try:
        cfg = CampaignConfig(d_min, d_max, engines, _mode(args, engines), args.jobs,
                             args.checkpoint, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc

    human = not args.json and not args.quiet

    def on_record(rec):
        if human:
            status = "pass" if rec.passed else "FAIL"
            sys.stdout.write(f"d={rec.d} det={rec.value} expected={rec.expected} {status}\n")

    try:
        report = run_campaign(cfg, on_record)
    except EngineDisagreement as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DISAGREE
    if args.out:
        report.write(args.out, args.timings)
    if getattr(args, "bfile", None):
        export_bfile(report, args.bfile)
    if args.json:
        sys.stdout.write(report.to_json(args.timings))
    passed = sum(r.passed for r in report.records)
    total = len(report.records)
    out = sys.stderr if args.json else sys.stdout
    for rec in report.failures:
        print(f"CONJECTURE VIOLATION at d={rec.d}: det={rec.value} expected={rec.expected}", file=out)
    print(f"{passed}/{total} pass ({report.total_seconds:.2f}s)", file=out)
    return EXIT_OK if report.all_pass else EXIT_VIOLATION


def cmd_explore(args) -> int:
    _check_d(args.d)
    if args.minors:
        vals = principal_minors(args.d)
        text = f"# d={args.d} leading principal minors\n" + "".join(
            f"{k} {v}\n" for k, v in enumerate(vals, start=1))
    else:
        if args.row is not None and not 1 <= args.row <= 2 * args.d:
            raise UsageError(f"--row must be in [1, {2 * args.d}], got {args.row}")
        text = cofactor_profile(args.d, args.row).dumps()
    _emit(text, args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.repetitions < 1:
        raise UsageError("--repetitions must be >= 1")
    for d in args.d:
        _check_d(d)
    rows = []
    mode = CrtMode.certified()
    for d in args.d:
        m = build_m(d)
        row = {"d": d}
        for name in args.engines:
            times = []
            for _ in range(args.repetitions):
                t0 = time.perf_counter()
                try:
                    run_engine(name, m, mode)
                except (DimensionTooLarge, StructuralMismatch):
                    times = None
                    break
                times.append(time.perf_counter() - t0)
            row[name] = None if times is None else statistics.median(times)
        rows.append(row)
    if args.json:
        print(json.dumps(rows, sort_keys=True))
        return EXIT_OK
    width = max(12, *(len(n) + 2 for n in args.engines))
    print("d".rjust(8) + "".join(n.rjust(width) for n in args.engines))
    for row in rows:
        cells = ["n/a" if row[n] is None else f"{row[n] * 1e3:.3f}ms" for n in args.engines]
        print(str(row["d"]).rjust(8) + "".join(c.rjust(width) for c in cells))
    return EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "det": cmd_det,
    "verify": cmd_campaign,
    "campaign": cmd_campaign,
    "explore": cmd_explore,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"detconj {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CheckpointCorruption as exc:
        print(f"error: corrupt checkpoint: {exc}", file=sys.stderr)
        return EXIT_IO
    except (OSError, UnicodeDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        # malformed matrix files
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
