from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path
from typing import Sequence

from dotenv import load_dotenv

from wellcap.archive import RunArchive
from wellcap.config import Settings, get_settings
from wellcap.db import build_session_factory, init_db
from wellcap.errors import ConfigError, ProblemFormatError, WellcapError
from wellcap.filtration import RadiiSchedule
from wellcap.geometry import NormKind
from wellcap.logging_setup import setup_logging
from wellcap.perturbation_lab import STRATEGIES
from wellcap.problem import ProblemFile, load_aux_values, load_problem, parse_rational
from wellcap.reports import CommandResult, dump_report, run_compute, run_diagram, run_perturb, run_verify

logger = logging.getLogger(__name__)


def _rational_arg(value: str):
    try:
        return parse_rational(value)
    except ProblemFormatError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", required=True, help="Problem file (JSON)")
    common.add_argument("--radius", type=_rational_arg, default=None, help="Radius r as p/q (default: smallest radius)")
    common.add_argument("--radii", default=None, help="Comma-separated radii overriding the problem file")
    common.add_argument("--norm", default=None, help="Norm override: linf or l1")
    common.add_argument("--degree", type=int, default=None, help="Only report cap images of H_k for this k")
    common.add_argument("--samples", type=int, default=None, help="Number of sampled perturbations (verify)")
    common.add_argument("--seed", type=int, default=None, help="Sampling seed (verify)")
    common.add_argument("--strategy", choices=STRATEGIES, default="mixed", help="Sampling strategy (verify)")
    common.add_argument("--out", default=None, help="Write the full JSON report here")
    common.add_argument("--mode", choices=("dual", "extension"), default="extension", help="Construction (perturb)")
    common.add_argument("--aux", default=None, help="Vertex values of h or e on K (perturb)")
    common.add_argument("--skeleton", type=int, default=None, help="Skeleton dimension i of the dual construction")
    common.add_argument("--limit", type=int, default=20, help="Number of archived runs to list (history)")

    cli = argparse.ArgumentParser(prog="wellcap", description="Cap-image lower bounds for well groups")
    sub = cli.add_subparsers(dest="command", required=True)
    sub.add_parser("compute", parents=[common], help="Obstruction class and cap images at one radius")
    sub.add_parser("diagram", parents=[common], help="Cap images over the radii schedule and their events")
    sub.add_parser("verify", parents=[common], help="Check sampled perturbations against the cap image")
    sub.add_parser("perturb", parents=[common], help="Build an r-perturbation from an extension or a skeleton")
    sub.add_parser("history", parents=[common], help="List archived runs of a problem file")
    return cli


def apply_overrides(problem: ProblemFile, args: argparse.Namespace) -> ProblemFile:
    if args.radii:
        values = [parse_rational(part) for part in args.radii.split(",") if part.strip()]
        if len(set(values)) != len(values):
            raise ProblemFormatError("--radii contains duplicates")
        problem = dataclasses.replace(problem, radii=RadiiSchedule.from_values(values))
    if args.norm:
        problem = dataclasses.replace(problem, norm=NormKind.parse(args.norm))
    return problem


def dispatch(problem: ProblemFile, args: argparse.Namespace, settings: Settings) -> CommandResult:
    if args.command == "compute":
        return run_compute(problem, settings, args.radius, args.degree)
    if args.command == "diagram":
        return run_diagram(problem, settings)
    if args.command == "verify":
        if args.samples is not None and args.samples < 0:
            raise ProblemFormatError("--samples must be >= 0")
        return run_verify(problem, settings, args.radius, args.samples, args.seed, args.strategy, args.degree)
    aux = load_aux_values(args.aux, problem.n) if args.aux else None
    return run_perturb(problem, settings, args.radius, args.mode, aux, args.skeleton)


def format_history(archive: RunArchive, problem: ProblemFile, limit: int) -> str:
    runs = archive.history(problem.digest, limit=limit)
    if not runs:
        return f"no archived runs for {problem.digest[:12]}"
    lines = [f"{len(runs)} archived runs for {problem.digest[:12]}"]
    for run in runs:
        samples = f" samples={run.samples_total} violated={run.samples_violated}" if run.samples_total else ""
        lines.append(
            f"#{run.run_id} {run.created_at:%Y-%m-%d %H:%M:%S} {run.command} r={run.radius or '-'} "
            f"exit={run.exit_code}{samples}"
        )
    return "\n".join(lines)


def run(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    load_dotenv()
    try:
        settings = get_settings()
    except ConfigError as exc:
        setup_logging("INFO")
        logger.error("%s", exc)
        return exc.exit_code
    setup_logging(settings.log_level)

    archive = None
    if settings.database_url:
        session_factory = build_session_factory(settings.database_url)
        init_db(session_factory)
        archive = RunArchive(session_factory)

    try:
        problem = apply_overrides(load_problem(args.input), args)
        if args.command == "history":
            if archive is None:
                raise ConfigError("DATABASE_URL is not set; there is no run archive")
            print(format_history(archive, problem, args.limit))
            return 0
        result = dispatch(problem, args, settings)
    except WellcapError as exc:
        logger.error("%s failed: %s", args.command, exc)
        return exc.exit_code

    text = dump_report(result.report)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        logger.info("Report written to %s", args.out)
    print(result.summary)

    if archive is not None:
        archive.record(
            command=args.command,
            problem_digest=problem.digest,
            report_json=text,
            exit_code=result.exit_code,
            summary=result.summary,
            problem_path=str(args.input),
            radius=result.radius,
            seed=result.seed,
            samples=result.samples,
        )
    if result.exit_code:
        logger.error("%s finished with exit code %s", args.command, result.exit_code)
    return result.exit_code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
