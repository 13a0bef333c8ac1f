"""Command-line entry point.

Usage:
    hurdle-glrm fit --input data.csv --schema schema.json --rank 6 --out runs/fit
    hurdle-glrm impute --input data.csv --schema schema.json --rank 4 --gamma-grid 0,0.1,1,10 --out runs/impute
    hurdle-glrm simulate --generator mar --seed 1 --out runs/sim
    hurdle-glrm experiment --experiment mar_table1 --seeds 30 --out runs/table1

Exit status is 0 on success, 2 for usage or configuration errors and 3 for
numeric failures. Every run writes ``manifest.json`` under ``--out``.
"""

import argparse
from collections.abc import Callable
from pathlib import Path

from pydantic import ValidationError
from rich.markup import escape

from hurdle_glrm.errors import HurdleGLRMError
from hurdle_glrm.experiments.registry import get_all_experiment_names
from hurdle_glrm.models.run_config import RunConfig
from hurdle_glrm.services.storage import write_manifest
from hurdle_glrm.telemetry import configure_logfire

from .common import console
from .experiment import cmd_experiment
from .fit import cmd_fit
from .impute import cmd_impute
from .simulate import cmd_simulate

COMMANDS: dict[str, Callable[[RunConfig], list[str]]] = {
    "fit": cmd_fit,
    "impute": cmd_impute,
    "simulate": cmd_simulate,
    "experiment": cmd_experiment,
}


def _float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _add_table_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", type=Path, help="CSV file (empty field = missing)")
    parser.add_argument("--schema", type=Path, help="JSON schema with one block per column")
    parser.add_argument("--rank", type=int, help="Rank k of the factorization")
    parser.add_argument("--gamma", type=float, help="Quadratic regularization weight")
    parser.add_argument(
        "--gamma-grid",
        type=_float_list,
        help="Comma-separated gamma values to choose from by held-out imputation error",
    )
    parser.add_argument("--max-sweeps", type=int, help="Alternating-minimization sweep cap")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hurdle-glrm",
        description="Generalized low-rank models with composite hurdle losses",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=f"""
Experiments:
  {", ".join(get_all_experiment_names())}
""",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, required=True, help="Output directory")
    common.add_argument("--seed", type=int, default=0, help="Random seed (default: 0)")

    fit = subparsers.add_parser("fit", parents=[common], help="Fit a table")
    _add_table_arguments(fit)

    impute = subparsers.add_parser("impute", parents=[common], help="Fit and impute a table")
    _add_table_arguments(impute)

    simulate = subparsers.add_parser("simulate", parents=[common], help="Simulate a dataset")
    simulate.add_argument("--generator", choices=["mar", "zero_inflated"], default="mar")
    simulate.add_argument("--rank", type=int, help="True rank of the simulated table")
    simulate.add_argument("--missing-rate", type=float, help="MCAR rate of column a1")
    simulate.add_argument(
        "--zero-rates", type=_float_list, help="Comma-separated per-column zero rates"
    )

    experiment = subparsers.add_parser(
        "experiment", parents=[common], help="Run a reproduction experiment"
    )
    experiment.add_argument("--experiment", required=True, help="Registered experiment name")
    experiment.add_argument(
        "--seeds", type=int, default=1, help="Number of consecutive seeds from --seed"
    )
    experiment.add_argument("--rank", type=int, help="Fitted rank (largest rank for curves)")
    experiment.add_argument("--gamma", type=float, help="Fixed gamma instead of selection")
    experiment.add_argument("--gamma-grid", type=_float_list, help="Gamma candidates")
    experiment.add_argument("--zero-rates", type=_float_list, help="Per-column zero rates")
    experiment.add_argument("--max-sweeps", type=int, help="Sweep cap for every fit")
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    fields = {k: v for k, v in vars(args).items() if v is not None}
    if "schema" in fields:
        fields["schema_path"] = fields.pop("schema")
    return RunConfig(**fields)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logfire()

    try:
        config = _run_config(args)
    except ValidationError as exc:
        error = exc.errors()[0]
        console.print(f"[red]Invalid arguments:[/red] {escape(error['msg'])}")
        return 2

    try:
        config.out.mkdir(parents=True, exist_ok=True)
        files = COMMANDS[config.command](config)
        write_manifest(config, files)
    except HurdleGLRMError as exc:
        console.print(f"[red]Error:[/red] {escape(exc.detail)}")
        return exc.exit_code

    console.print(f"[bold green]✓ {config.command} complete[/bold green] [dim]({config.out})[/dim]")
    return 0
