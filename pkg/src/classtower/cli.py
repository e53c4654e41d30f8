"""Command-line front end: ``classtower <subcommand> ...``.

Exit status: 0 success, 1 usage error, 2 violated precondition,
3 internal invariant failure. Data goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .arith import RadicandRejected
from .artin import artin_pattern, cycle_type
from .pcgroup import SizeGuardError, lower_central_series
from .quadclass import class_group, reduced_forms
from .survey import classify_radicand, export, survey, verify
from .towers import (
    Family,
    ThreeStageParams,
    TowerParams,
    build_G,
    group_G,
    predicted_pattern2,
    predicted_pattern3,
    three_stage_identifiers,
    tree_position,
)

EXIT_USAGE, EXIT_PRECONDITION, EXIT_INTERNAL = 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _cmd_classgroup(args) -> None:
    cg = class_group(args.D)
    print(f"D = {cg.discriminant}")
    print(f"h = {cg.order}")
    print("invariants = (" + ",".join(map(str, cg.invariants)) + ")")
    if args.forms:
        for f in reduced_forms(args.D):
            print(f"  ({f.a},{f.b},{f.c})")


def _cmd_group(args) -> None:
    pres = build_G(args.m, args.n)
    G = group_G(args.m, args.n)
    series = lower_central_series(G)
    print(f"order = {G.order} = 2^{args.m + args.n + 3}")
    print(f"class = {series.nilpotency_class}")
    print(f"coclass = {series.coclass}")
    print("lower central series orders = " + " > ".join(str(t.order) for t in series.terms))
    print(f"position = {tree_position(TowerParams(args.m, args.n)).label}")
    print("presentation:")
    sys.stdout.write(pres.to_text())


def _print_pattern(pattern) -> None:
    sys.stdout.write(pattern.to_text())
    if len(pattern.tkt) > 1:
        cycles = cycle_type(pattern.tkt[1])
        if cycles is not None:
            print(f"kappa1 cycle type: {cycles[1]} fixed point(s), {cycles[2]} 2-cycle(s)")


def _cmd_pattern(args) -> None:
    params = TowerParams(args.m, args.n)
    if args.predicted:
        _print_pattern(predicted_pattern2(params))
    else:
        _print_pattern(artin_pattern(group_G(args.m, args.n)))


def _cmd_classify(args) -> None:
    rec = classify_radicand(args.d)
    params = TowerParams(rec.m, rec.n)
    pos = tree_position(params)
    print(f"d = {rec.d} = {rec.p1} * {rec.p2} * {rec.q}")
    print(f"(p2/q) = {rec.legendre_p2_q}")
    print(f"(m,n) = ({rec.m},{rec.n})")
    print(f"order = 2^{rec.m + rec.n + 3}")
    print(f"family = {pos.family}")
    print(f"symbol = {pos.symbol}")
    print(f"label = {pos.label}")
    if pos.smallgroup_id:
        print(f"smallgroup = {pos.smallgroup_id}")
    print("predicted pattern:")
    _print_pattern(predicted_pattern2(params))


def _cmd_classify3(args) -> None:
    params = ThreeStageParams(args.u, Family.parse(args.family), args.variant)
    group, meta = three_stage_identifiers(params)
    print(f"G = {group}")
    print(f"G/G'' = {meta}")
    print("predicted pattern:")
    _print_pattern(predicted_pattern3(params))


def _cmd_survey(args) -> None:
    def progress(done: int, total: int) -> None:
        if args.verbose:
            print(f"survey: chunk {done}/{total}", file=sys.stderr)

    summary = survey(args.lo, args.hi, workers=args.workers, cache_dir=args.cache_dir, progress=progress)
    if args.output:
        export(summary.records, args.output, args.format)
    elif args.format and args.records:
        export(summary.records, sys.stdout, args.format)
    print(f"count = {summary.count}")
    print("minimal radicands:")
    sys.stdout.write(summary.table.render())
    exceptions = [r.d for r in summary.records if (r.n == 1) != (r.legendre_p2_q == -1)]
    print(f"legendre check: {len(exceptions)} exception(s)")
    print(f"survey ({args.lo}, {args.hi}): {summary.seconds:.1f}s", file=sys.stderr)
    if summary.failures:
        raise RuntimeError(f"{len(summary.failures)} radicand(s) failed, first d = {summary.failures[0][0]}")
    if exceptions:
        raise RuntimeError(f"legendre equivalence fails for d = {exceptions[:5]}")


def _cmd_verify(args) -> None:
    def show(cell) -> None:
        status = "pass" if cell.passed else "FAIL " + "; ".join(cell.diffs)
        print(f"G({cell.m},{cell.n}): {status}", flush=True)

    report = verify(args.mmax, args.nmax, on_cell=show)
    ok = sum(c.passed for c in report.cells)
    print(f"{ok}/{len(report.cells)} cells pass")
    if not report.passed:
        raise RuntimeError("verification failed")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="classtower", description="2-class towers of Q(sqrt(-1), sqrt(d)) and their Artin patterns")
    parser.add_argument("-v", "--verbose", action="store_true", help="progress and debug output on stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("classgroup", help="class group of a negative discriminant")
    p.add_argument("D", type=int)
    p.add_argument("--forms", action="store_true", help="also list the reduced forms")
    p.set_defaults(func=_cmd_classgroup)

    p = sub.add_parser("group", help="order, class, coclass and presentation of G(m,n)")
    p.add_argument("m", type=int)
    p.add_argument("n", type=int)
    p.set_defaults(func=_cmd_group)

    p = sub.add_parser("pattern", help="Artin pattern of G(m,n)")
    p.add_argument("m", type=int)
    p.add_argument("n", type=int)
    p.add_argument("--predicted", action="store_true", help="print the closed-form prediction instead")
    p.set_defaults(func=_cmd_pattern)

    p = sub.add_parser("classify", help="parameters and tree position of a radicand")
    p.add_argument("d", type=int)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("classify3", help="labels and pattern of a 3-stage tower")
    p.add_argument("u", type=int)
    p.add_argument("family", help="E6-E14 (or E6, E14, Q, 49) / E8-E9 (or E8, E9, U, 54)")
    p.add_argument("variant", type=int)
    p.set_defaults(func=_cmd_classify3)

    p = sub.add_parser("survey", help="scan radicands lo < d < hi")
    p.add_argument("lo", type=int)
    p.add_argument("hi", type=int)
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p.add_argument("--output", "-o", help="write records to this file")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--records", action="store_true", help="print records to stdout when no --output is given")
    p.add_argument("--cache-dir", help="reuse or store results under this directory")
    p.set_defaults(func=_cmd_survey)

    p = sub.add_parser("verify", help="compare computed and predicted patterns on a box of (m,n)")
    p.add_argument("mmax", type=int)
    p.add_argument("nmax", type=int)
    p.set_defaults(func=_cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (RadicandRejected, SizeGuardError, ValueError) as exc:
        print(f"classtower: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (RuntimeError, AssertionError) as exc:
        print(f"classtower: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except BrokenPipeError:
        return 0
    return 0


if __name__ == "__main__":
    sys.exit(main())
