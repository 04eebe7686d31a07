"""
Command-line front end.

Subcommands:
    certify     print certification margins, exit 1 if any check fails
    simulate    run once and write CSV, JSON and JSON-lines output
    montecarlo  run a seeded campaign and write its summary and run table
    shapes      list the shape library or emit a scenario skeleton

Exit codes: 0 success, 1 certification failure, 2 simulation-fatal event,
3 input error.

Example:
    cyclic-formation certify hexagon
    cyclic-formation simulate octahedron --out runs/octa --seed 3
    cyclic-formation montecarlo quad_swarm --samples 10 --workers 4
    cyclic-formation shapes emit dome --out dome.json
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

from cyclic_formation import __version__
from cyclic_formation.core.report import CertificationReport
from cyclic_formation.exceptions import (
    FormationError,
    ParameterError,
    ScenarioError,
    StructuralError,
)
from cyclic_formation.facade import Formation
from cyclic_formation.simulation.export import (
    CERTIFICATION_FILE,
    write_certification_json,
)
from cyclic_formation.simulation.scenario import default_output_dir, emit_scenario
from cyclic_formation.simulation.shapes import shape_names, skeleton_scenario

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NOT_CERTIFIED = 1
EXIT_FATAL = 2
EXIT_INPUT = 3

INPUT_ERRORS = (ScenarioError, ParameterError, StructuralError)


# =========================================================================
# Parser
# =========================================================================


def _add_overrides(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("scenario", help="scenario file or bundled scenario name")
    parser.add_argument("--seed", type=int, help="override the scenario seed")
    parser.add_argument("--dt", type=float, help="override the integration step (s)")
    parser.add_argument("--t-end", type=float, help="override the run length (s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cyclic-formation",
        description="Certify and simulate cyclic-pursuit formations.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="-v for progress messages, -vv for lag-window details",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    certify = commands.add_parser("certify", help="check the convergence conditions")
    _add_overrides(certify)
    certify.add_argument("--out", type=Path, help="also write certification.json here")

    simulate = commands.add_parser("simulate", help="run the scenario once")
    _add_overrides(simulate)
    simulate.add_argument("--out", type=Path, help="output directory")

    campaign = commands.add_parser("montecarlo", help="run a Monte Carlo campaign")
    _add_overrides(campaign)
    campaign.add_argument("--samples", type=int, help="number of runs")
    campaign.add_argument("--radius", type=float, help="initial ball radius (m)")
    campaign.add_argument("--workers", type=int, help="worker processes")
    campaign.add_argument("--progress", action="store_true", help="progress bar")
    campaign.add_argument("--out", type=Path, help="output directory")

    shapes = commands.add_parser("shapes", help="built-in polyhedra")
    actions = shapes.add_subparsers(dest="action", required=True)
    actions.add_parser("list", help="print the shape names")
    emit = actions.add_parser("emit", help="print a scenario skeleton")
    emit.add_argument("name", help="shape name")
    emit.add_argument("--side", type=float, default=1.0, help="edge length (m)")
    emit.add_argument("--out", type=Path, help="write to a file instead of stdout")
    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _formation(args: argparse.Namespace) -> Formation:
    formation = Formation.load(args.scenario)
    return formation.with_overrides(
        seed=args.seed,
        dt=args.dt,
        t_end=args.t_end,
        samples=getattr(args, "samples", None),
        workers=getattr(args, "workers", None),
    )


def _output_dir(args: argparse.Namespace, formation: Formation) -> Path:
    if args.out is not None:
        return Path(args.out)
    return default_output_dir() / formation.scenario.name


# =========================================================================
# Commands
# =========================================================================


def _print_report(name: str, report: CertificationReport) -> None:
    print(f"scenario: {name}")
    for entry in report.entries:
        verdict = "ok" if entry.certified else "FAILED"
        print(f"  {entry.name}: {verdict} (margin {entry.margin:.6g})")
        for warning in entry.warnings:
            print(f"    warning: {warning}")
    if report.contraction_rate is not None:
        print(f"  contraction rate: {report.contraction_rate:.6g}")
    if report.tau_bound is not None:
        print(f"  tau bound: {report.tau_bound:.6g} s")
    if report.steady_state_bound is not None:
        print(f"  steady-state bound: {report.steady_state_bound:.6g}")
    for note in report.notes:
        print(f"  note: {note}")
    print(f"  certified: {'yes' if report.passed else 'no'}")


def cmd_certify(args: argparse.Namespace) -> int:
    formation = _formation(args)
    report = formation.certify()
    _print_report(formation.scenario.name, report)
    if args.out is not None:
        write_certification_json(report, Path(args.out) / CERTIFICATION_FILE)
    return EXIT_OK if report.passed else EXIT_NOT_CERTIFIED


def cmd_simulate(args: argparse.Namespace) -> int:
    formation = _formation(args)
    result = formation.simulate()
    directory = _output_dir(args, formation)
    paths = result.write(directory)
    m = result.metrics
    print(f"scenario: {m.scenario} (seed {m.seed})")
    print(f"  status: {m.status} after {m.steps} steps, t = {m.t_final:.6g} s")
    print(f"  formation error ratio: {m.formation_ratio:.3g}")
    if m.max_side_error is not None:
        print(f"  max side error: {m.max_side_error:.3g}")
    if m.center_error_final is not None:
        print(f"  center error: {m.center_error_final:.3g} m")
    print(f"  min distance: {m.min_distance:.4g} m")
    print(f"  converged: {'yes' if m.converged else 'no'}")
    print(f"  output: {directory}")
    logger.info("wrote %s", ", ".join(str(p) for p in paths.values()))
    return EXIT_FATAL if result.fatal else EXIT_OK


def cmd_montecarlo(args: argparse.Namespace) -> int:
    formation = _formation(args)
    report = formation.monte_carlo(radius_m=args.radius, progress=args.progress)
    directory = _output_dir(args, formation)
    formation.write_monte_carlo(report, directory)
    print(f"scenario: {report.scenario} (master seed {report.master_seed})")
    print(f"  samples: {report.samples}, radius {report.radius_m:g} m")
    print(f"  converged: {report.converged_count}")
    print(f"  collisions: {report.collision_count}")
    print(f"  diverged: {report.diverged_count}")
    print(f"  failed: {report.failed_count}")
    print(f"  output: {directory}")
    return EXIT_FATAL if report.fatal else EXIT_OK


def cmd_shapes(args: argparse.Namespace) -> int:
    if args.action == "list":
        for name in shape_names():
            print(name)
        return EXIT_OK
    text = emit_scenario(skeleton_scenario(args.name, args.side))
    if args.out is None:
        sys.stdout.write(text)
    else:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")
        print(f"wrote {out}")
    return EXIT_OK


COMMANDS = {
    "certify": cmd_certify,
    "simulate": cmd_simulate,
    "montecarlo": cmd_montecarlo,
    "shapes": cmd_shapes,
}


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point of the ``cyclic-formation`` console script."""
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    try:
        return COMMANDS[args.command](args)
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FormationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
