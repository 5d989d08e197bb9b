"""Command-line entry point: ``openingbench {run,compare,simulate,report,openings,play}``."""

from __future__ import annotations

import argparse
import logging
import sys
import warnings
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from .hypothesis import compare
from .model import OutcomeCounts, estimate_fma_imp, make_vector
from .montecarlo import centroid, derive_seed, export_scatter, scatter_csv, simulate_experiment
from .openings import BUILTIN_OPENINGS, builtin_opening, group_baseline, validate_spec
from .pgn import write_pgn
from .rules import Color
from .study import (
    builtin_study,
    format_table,
    load_state,
    load_study,
    report_comparisons,
    report_counts,
    run_study,
)
from .uci import EngineConfig, EngineError, MatchConfig, SearchLimit, run_match

log = logging.getLogger("openingbench")


def _triple(text: str) -> OutcomeCounts:
    try:
        w, b, d = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WHITE,BLACK,DRAWS, got {text!r}") from None
    try:
        return OutcomeCounts.of(w, b, d)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _pair(text: str) -> tuple[float, float]:
    try:
        pw, pb = (float(x) for x in text.split(","))
        make_vector(pw, pb)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected P_W,P_B probabilities: {exc}") from None
    return pw, pb


def _common(p: argparse.ArgumentParser, seed: bool = True, reps: bool = True) -> None:
    if seed:
        p.add_argument("--seed", type=int, help="master seed")
    if reps:
        p.add_argument("--reps", type=int, help="simulated matches per cluster")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="openingbench", description=__doc__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a study and write its report files")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("config", nargs="?", type=Path, help="study YAML file")
    src.add_argument("--builtin", choices=("reference", "synthetic"), help="use a packaged study")
    _common(p)
    p.add_argument("--alpha", type=float, help="family-wise level per baseline")
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--svg", action="store_true", help="also render scatter plots (needs matplotlib)")

    p = sub.add_parser("compare", help="test two tallies against each other")
    p.add_argument("--test", type=_triple, required=True, metavar="W,B,D")
    p.add_argument("--base", type=_triple, required=True, metavar="W,B,D")
    p.add_argument("--innovator", choices=("white", "black"))
    _common(p)
    p.add_argument("--alpha", type=float, default=0.001)
    p.add_argument("--out", type=Path, help="write the scatter CSV here")

    p = sub.add_parser("simulate", help="simulate a cluster of matches and describe it")
    what = p.add_mutually_exclusive_group(required=True)
    what.add_argument("--counts", type=_triple, metavar="W,B,D")
    what.add_argument("--vector", type=_pair, metavar="P_W,P_B")
    p.add_argument("--games", type=int, default=300)
    _common(p)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", type=Path, help="write the simulated points as CSV")

    p = sub.add_parser("report", help="recompute the tables from a study output directory")
    p.add_argument("dir", type=Path)
    _common(p)
    p.add_argument("--alpha", type=float)
    p.add_argument("--out", type=Path, help="write the refreshed files here (default: print only)")
    p.add_argument("--svg", action="store_true")

    sub.add_parser("openings", help="list and validate the built-in openings")

    p = sub.add_parser("play", help="play an engine match from a built-in opening")
    p.add_argument("--opening", required=True, help="ECO code of a built-in opening")
    p.add_argument("--engine", help="engine command (default: $OPENINGBENCH_ENGINE)")
    p.add_argument("--option", action="append", default=[], metavar="NAME=VALUE")
    p.add_argument("--games", type=int, default=10)
    p.add_argument("--depth", type=int, default=22)
    p.add_argument("--max-fullmoves", type=int, default=250)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", type=Path, help="write the games as PGN")
    return parser


def _override(config, args):
    changes = {}
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    if getattr(args, "reps", None) is not None:
        changes["repetitions"] = args.reps
    if getattr(args, "alpha", None) is not None:
        changes["family_alpha"] = args.alpha
    return replace(config, **changes) if changes else config


def _print_report(report) -> None:
    print(format_table(report_counts(report.experiments)))
    print()
    print(format_table(report_comparisons(report.comparisons)))
    for o in report.experiments:
        if o.error:
            print(f"experiment {o.config.id} failed: {o.error}", file=sys.stderr)
        elif o.aborted:
            print(f"experiment {o.config.id}: {o.aborted} game(s) aborted", file=sys.stderr)
    for note in report.skipped:
        print(note, file=sys.stderr)


def cmd_run(args) -> int:
    config = builtin_study(args.builtin) if args.builtin else load_study(args.config)
    report = run_study(_override(config, args), args.out, workers=args.workers, svg=args.svg)
    _print_report(report)
    print(f"\nwrote {len(report.files)} files to {args.out}")
    failed = any(o.error for o in report.experiments) or any(r.result is None for r in report.comparisons)
    return 1 if failed else 0


def cmd_report(args) -> int:
    config = _override(load_state(args.dir), args)
    report = run_study(config, args.out, svg=args.svg)
    _print_report(report)
    return 0


def cmd_compare(args) -> int:
    innovator = {"white": Color.WHITE, "black": Color.BLACK}.get(args.innovator)
    reps = args.reps or 1000
    seed = 0 if args.seed is None else args.seed
    r = compare(args.test, args.base, reps, seed, args.alpha, innovator)
    print(f"distance  {r.distance:.3f}")
    print(f"stdev     {r.pooled_stdev:.3f}")
    print(f"t-value   {r.t_value:.3f}")
    print(f"p-value   {r.p_value:.3G}")
    print(f"alpha     {r.alpha:g}")
    print(f"decision  {r.decision.label}")
    if r.category is not None:
        print(f"category  {r.category.value}")
    if args.out:
        args.out.write_text(scatter_csv(export_scatter(r.base_cluster, r.test_cluster)), encoding="utf-8")
    return 0


def cmd_simulate(args) -> int:
    seed = 0 if args.seed is None else args.seed
    reps = args.reps or 1000
    if args.counts is not None:
        pi = make_vector(args.counts.white / args.counts.total, args.counts.black / args.counts.total)
        games = args.counts.total
    else:
        pi = make_vector(*args.vector)
        games = args.games
    cluster = simulate_experiment(pi, games, reps, derive_seed(seed, "simulate"), args.workers)
    c = centroid(cluster)
    print(f"vector    [{pi.p_w:.4f}, {pi.p_b:.4f}, {pi.p_d:.4f}]")
    print(f"centroid  ({c.mean_white:.3f}, {c.mean_black:.3f}) over {reps} matches of {games} games")
    if args.counts is not None and args.counts.black <= args.counts.white:
        fi = estimate_fma_imp(args.counts)
        print(f"fma       {fi.fma:.4f}")
        print(f"imp       {fi.imp:.4f}")
    if args.out:
        rows = [f"{w},{b}" for w, b in cluster.points.tolist()]
        args.out.write_text("white_wins,black_wins\n" + "\n".join(rows) + "\n", encoding="utf-8")
    return 0


def cmd_openings(args) -> int:
    bad = 0
    for spec in BUILTIN_OPENINGS:
        report = validate_spec(spec, group_baseline(spec))
        ply = "-" if spec.innovation_ply is None else str(spec.innovation_ply)
        state = "ok" if report.ok else "; ".join(report.violations)
        bad += not report.ok
        print(f"{spec.eco}  group {spec.group}  {spec.role.value:<8}  ply {ply}  {' '.join(spec.prefix):<32}  {state}")
    return 1 if bad else 0


def cmd_play(args) -> int:
    options = dict(o.split("=", 1) for o in args.option)
    limit = SearchLimit(args.depth)
    if args.engine:
        engine = EngineConfig(tuple(args.engine.split()), options=options, limit=limit)
    else:
        engine = EngineConfig.from_env(options=options, limit=limit)
    config = MatchConfig(
        builtin_opening(args.opening),
        games=args.games,
        engine=engine,
        max_fullmoves=args.max_fullmoves,
        workers=args.workers,
    )
    result = run_match(config)
    c = result.counts
    print(f"white {c.white}  black {c.black}  draws {c.draws}  total {c.total}  aborted {len(result.aborted)}")
    if args.out:
        args.out.write_text(write_pgn(result.records, {"Event": f"{args.opening} match"}), encoding="utf-8")
    return 0


COMMANDS = {
    "run": cmd_run,
    "report": cmd_report,
    "compare": cmd_compare,
    "simulate": cmd_simulate,
    "openings": cmd_openings,
    "play": cmd_play,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    logging.captureWarnings(True)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return COMMANDS[args.command](args)
    except (ValueError, EngineError, KeyError, OSError) as exc:
        print(f"openingbench: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
