"""Shared pieces of the subcommands."""

import numpy as np
import pandas as pd
from rich.console import Console

from hurdle_glrm.errors import ConfigError
from hurdle_glrm.models.factorization import Factorization
from hurdle_glrm.models.fit_config import FitConfig
from hurdle_glrm.models.report import ColumnSummary, FitReport
from hurdle_glrm.models.run_config import RunConfig, TableSchema
from hurdle_glrm.models.table import DataTable
from hurdle_glrm.services.diagnostics import column_association, loss_explained, nu_scores
from hurdle_glrm.services.ingestion import load_schema, load_table
from hurdle_glrm.services.solver import calibrate, data_loss, fit, select_gamma
from hurdle_glrm.services.storage import write_csv, write_frame, write_json

console = Console()


def fit_config(config: RunConfig, gamma: float = 0.0) -> FitConfig:
    if config.rank is None:
        raise ConfigError("--rank is required")
    update = {"k": config.rank, "seed": config.seed, "gamma_x": gamma, "gamma_y": gamma}
    if config.max_sweeps is not None:
        update["max_sweeps"] = config.max_sweeps
    return FitConfig(**update)


def load_inputs(config: RunConfig) -> tuple[DataTable, TableSchema]:
    if config.input is None or config.schema_path is None:
        raise ConfigError("--input and --schema are required")
    schema = load_schema(config.schema_path)
    return load_table(config.input, schema), schema


def fit_input(config: RunConfig) -> tuple[DataTable, FitConfig, Factorization, list[float]]:
    """Load, calibrate, pick gamma, and fit the table named by ``config``."""
    table, _ = load_inputs(config)
    calibrated = calibrate(table)
    settings_for_fit = fit_config(config)
    gamma = config.gamma or 0.0
    if config.gamma_grid is not None:
        gamma = select_gamma(table, settings_for_fit, grid=config.gamma_grid, seed=config.seed)
        console.print(f"  Selected gamma: {gamma:g}")
    settings_for_fit = settings_for_fit.with_gamma(gamma)
    console.print(
        f"[bold blue]Fitting rank {settings_for_fit.k} model "
        f"({table.n_rows} rows, {calibrated.embedded_dim} embedded columns)...[/bold blue]"
    )
    fact, trace = fit(calibrated, settings_for_fit)
    console.print(f"[green]✓[/green] {len(trace) - 1} sweeps, objective {trace[-1]:.6g}")
    return calibrated, settings_for_fit, fact, trace


def fit_report(
    table: DataTable, config: FitConfig, fact: Factorization, trace: list[float]
) -> FitReport:
    columns = []
    for column in table.columns:
        columns.append(
            ColumnSummary(
                name=column.name,
                loss=column.value_loss.kind.value,
                embed_dim=column.embed_dim,
                offset=[float(m) for m in fact.mu[fact.span(column.name)]],
                scale=column.scale,
                lambda1=column.loss.lambda1 if column.is_hurdle else None,
                lambda2=column.loss.lambda2 if column.is_hurdle else None,
            )
        )
    return FitReport(
        k=config.k,
        gamma_x=config.gamma_x,
        gamma_y=config.gamma_y,
        seed=config.seed,
        objective_trace=trace,
        loss_explained=loss_explained(table, config, fact),
        total_loss=data_loss(table, fact),
        columns=columns,
    )


def write_hurdle_diagnostics(config: RunConfig, table: DataTable, fact: Factorization) -> list[str]:
    """nu-probability scores and association tables for every hurdle column."""
    hurdle = [c.name for c in table.columns if c.is_hurdle]
    if not hurdle:
        return []
    files = ["nu_scores.csv"]
    scores = np.column_stack([nu_scores(fact, name) for name in hurdle])
    write_csv(config.out / "nu_scores.csv", scores, hurdle)
    for name in hurdle:
        rows = column_association(fact, name, include_self=True)
        file_name = f"associations_{name}.csv"
        write_frame(config.out / file_name, pd.DataFrame([r.model_dump() for r in rows]))
        files.append(file_name)
    return files


def write_report(config: RunConfig, report: FitReport) -> list[str]:
    write_json(config.out / "metrics.json", report)
    return ["metrics.json"]
