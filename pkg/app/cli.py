#!/usr/bin/env python3
"""Ankle Walker - CLI entry point."""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from dotenv import load_dotenv

from app.utils.exceptions import WalkerError

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FELL = 2
EXIT_INTERRUPTED = 130

# Bundled scenario used when --scenario is not given.
DEFAULT_SCENARIOS = {
    "simulate": "case1_nominal",
    "sweep": "sweep",
    "ankle-stabilization": "ankle_stabilization",
    "perturb": "perturb",
    "compare": "compare",
    "poincare": "poincare",
    "plot": "case1_nominal",
}

# Subcommand flags that map one-to-one onto experiment-block fields.
EXPERIMENT_FLAGS = (
    "duration",
    "cases",
    "switch_time",
    "offsets",
    "delta_vx",
    "inject_time",
    "warmup_strides",
)

EPILOG = """
Examples:
  walker simulate --scenario case1_nominal --duration 40
  walker sweep --cases 1,2,3 --jobs 3
  walker experiment ankle-stabilization --switch-time 30 --offsets 0.309,0.312,0.315
  walker experiment perturb --delta-vx 0.15 --inject-time 30
  walker compare --scenario case1_nominal.cfg
  walker poincare --scenario case2_nominal
  walker plot runs/case1_nominal/trace.csv --reference human.csv

Scenarios are TOML files; bundled names (case1_nominal, case2_nominal,
case3_nominal, sweep, ankle_stabilization, compare, poincare, perturb)
can be given without a path. Outputs go to --output, the scenario's
output_dir, or $WALKER_OUTPUT_ROOT/<scenario name>.
"""


def _float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'")


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'")


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per experiment."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", "-s", help="Scenario TOML file or bundled scenario name")
    common.add_argument("--output", "-o", type=Path, help="Output directory for this run")
    common.add_argument("--jobs", "-j", type=int, help="Worker processes for multi-run experiments")
    common.add_argument(
        "--strict", action="store_true", help="Exit with status 2 when any run falls"
    )
    common.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Log level (default: WALKER_LOG_LEVEL or INFO)",
    )
    common.add_argument(
        "--verbose", "-v", action="store_true", help="Shortcut for --log-level DEBUG"
    )

    parser = argparse.ArgumentParser(
        prog="walker",
        description="Simulate and analyse the ankle-augmented forced-oscillation walking model",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=EPILOG,
    )
    parser.add_argument(
        "--version", "-V",
        action="version",
        version=f"%(prog)s {_get_version()}",
    )
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    simulate = commands.add_parser("simulate", parents=[common], help="Simulate one walker")
    simulate.add_argument("--duration", "-d", type=float, help="End time (s)")

    sweep = commands.add_parser("sweep", parents=[common], help="Compare the stiffness cases")
    sweep.add_argument("--cases", type=_int_list, help="Case ids, e.g. 1,2,3")
    sweep.add_argument("--duration", "-d", type=float, help="End time (s)")

    experiment = commands.add_parser(
        "experiment", parents=[common], help="Run a controller experiment"
    )
    experiment.add_argument("kind", choices=["ankle-stabilization", "perturb"])
    experiment.add_argument("--duration", "-d", type=float, help="End time (s)")
    experiment.add_argument(
        "--switch-time", type=float, help="Time placement control is switched off (s)"
    )
    experiment.add_argument(
        "--offsets", type=_float_list, help="Fixed heel offsets after the switch (m)"
    )
    experiment.add_argument("--delta-vx", type=float, help="Forward velocity kick (m/s)")
    experiment.add_argument("--inject-time", type=float, help="Time of the kick (s)")

    compare = commands.add_parser(
        "compare", parents=[common], help="Ankle-foot model against the point-foot ablation"
    )
    compare.add_argument("--duration", "-d", type=float, help="End time (s)")

    poincare = commands.add_parser(
        "poincare", parents=[common], help="Fixed point and eigenvalues of the stride map"
    )
    poincare.add_argument("--warmup-strides", type=int, help="Strides walked before iterating")

    plot = commands.add_parser("plot", parents=[common], help="Analyse and plot a trace CSV")
    plot.add_argument("trace", type=Path, help="Trace CSV written by an earlier run")
    plot.add_argument("--reference", type=Path, help="Percent-normalised reference gait CSV")
    return parser


def configure_logging(level: str) -> None:
    """Route all logging through a single rich handler on stderr."""
    from rich.console import Console
    from rich.logging import RichHandler

    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def _experiment_kind(args: argparse.Namespace) -> str:
    return args.kind if args.command == "experiment" else args.command


def _experiment_updates(args: argparse.Namespace) -> dict:
    """Experiment-block fields given on the command line."""
    return {name: getattr(args, name, None) for name in EXPERIMENT_FLAGS}


def run_command(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse arguments, run the requested experiment and return the exit status.

    Returns:
        0 on success, 1 on error, 2 on a fall with ``--strict`` (and on
        argument errors), 130 when interrupted
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    load_dotenv()
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        # Import here to keep --help and --version fast
        from app.agent import ExperimentAgent
        from app.config import get_settings
        from app.models.scenario import retarget
        from app.services.scenario_loader import load_scenario

        settings = get_settings()
        level = "DEBUG" if args.verbose else (args.log_level or settings.log_level)
        configure_logging(level.upper())

        kind = _experiment_kind(args)
        scenario = load_scenario(args.scenario or DEFAULT_SCENARIOS[kind])
        if kind != "plot":
            scenario = retarget(scenario, kind).with_experiment(**_experiment_updates(args))

        agent = ExperimentAgent(
            scenario,
            settings=settings,
            output_dir=args.output or (args.trace.parent / "plots" if kind == "plot" else None),
            jobs=args.jobs,
            command=["walker", *argv],
            reference_path=getattr(args, "reference", None),
        )
        outcome = agent.plot(args.trace) if kind == "plot" else agent.run()

    except KeyboardInterrupt:
        print("\nInterrupted", file=sys.stderr)
        return EXIT_INTERRUPTED
    except WalkerError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as e:
        logging.getLogger(__name__).debug("Unexpected failure", exc_info=True)
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_ERROR

    if outcome.fell and args.strict:
        return EXIT_FELL
    return EXIT_OK


def main():
    """Main entry point for the walking simulator."""
    sys.exit(run_command())


def _get_version() -> str:
    """Get the package version."""
    try:
        from importlib.metadata import version
        return version("ankle-walker")
    except Exception:
        return "0.1.0"


if __name__ == "__main__":
    main()
