import argparse
import io
import logging
import sys
from pathlib import Path
from typing import List, Optional

from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from ..errors import ConfigurationError
from ..geometry import Domain, catalog, render_preview
from .runner import EXIT_SCHEMA, RunResult, run_scenario
from .schema import bundled_scenarios, resolve_scenario

logger = logging.getLogger(__name__)


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def list_catalog(previews: bool = False, width: int = 100) -> str:
    """Shapes with their default parameters, then the bundled scenarios."""
    buffer = io.StringIO()
    console = Console(file=buffer, width=width, force_terminal=False, color_system=None)

    shapes = Table(title="shapes")
    shapes.add_column("shape")
    shapes.add_column("parameters")
    for name, params in catalog():
        shapes.add_row(name, ", ".join(f"{key}={value:.6g}" for key, value in params.items()))
    console.print(shapes)

    scenarios = Table(title="scenarios")
    scenarios.add_column("name")
    for name in bundled_scenarios():
        scenarios.add_row(name)
    console.print(scenarios)

    if previews:
        for name, params in catalog():
            console.print(name)
            console.print(render_preview(Domain.from_dict({"shape": name, "params": params}), 32), markup=False)
    return buffer.getvalue()


def _summary(result: RunResult, console: Console) -> None:
    table = Table(title=f"{result.scenario}")
    table.add_column("stage")
    table.add_column("check")
    table.add_column("result")
    table.add_column("detail")
    for check in result.checks:
        table.add_row(check.stage, check.name, "pass" if check.passed else "FAIL", check.detail)
    console.print(table)
    if result.error:
        console.print(f"error: {result.error}", markup=False)
    console.print(f"{len(result.files)} files written, exit {result.exit_code}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heatbound", description="Heat kernel bound experiments on planar domains.")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run a scenario file or a bundled scenario by name.")
    run.add_argument("--config", required=True, help="Scenario JSON path or bundled scenario name.")
    run.add_argument("--out-dir", default=None, help="Directory for reports (default: the scenario's output_dir).")
    run.add_argument("--threads", type=int, default=1, help="Worker threads for sample loops.")
    run.add_argument("--verbose", action="store_true", help="Log at DEBUG level.")

    listing = commands.add_parser("list", help="List shapes and bundled scenarios.")
    listing.add_argument("--previews", action="store_true", help="Show an ASCII preview of each shape.")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    console = Console()

    if args.command == "list":
        console.print(list_catalog(previews=args.previews), end="", markup=False)
        return 0

    _configure_logging(args.verbose)
    if args.threads < 1:
        logger.error("--threads must be at least 1.")
        return EXIT_SCHEMA
    try:
        scenario = resolve_scenario(args.config)
    except ConfigurationError as exc:
        logger.error("invalid scenario: %s", exc)
        return EXIT_SCHEMA

    out_dir = Path(args.out_dir) if args.out_dir else None
    result = run_scenario(scenario, out_dir=out_dir, threads=args.threads)
    _summary(result, console)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
