"""Hurdle model against PCA on a zero-inflated count table, across ranks."""

from dataclasses import dataclass, field
from pathlib import Path

import logfire
import numpy as np
import pandas as pd

from hurdle_glrm.config.constants import ZERO_INFLATED_N_COLUMNS, ZERO_INFLATED_N_ROWS
from hurdle_glrm.errors import ConfigError
from hurdle_glrm.models.fit_config import FitConfig
from hurdle_glrm.models.hurdle import HurdleSpec
from hurdle_glrm.models.loss import poisson
from hurdle_glrm.models.table import ColumnSpec, DataTable
from hurdle_glrm.services.baselines import pca_glrm
from hurdle_glrm.services.diagnostics import (
    column_sd,
    loss_explained,
    misclassification_rate,
    nu_scores,
    weighted_sse,
)
from hurdle_glrm.services.simgen import simulate_zero_inflated
from hurdle_glrm.services.solver import calibrate, fit, reconstruct_table
from hurdle_glrm.services.storage import write_frame, write_json

# PCA reads any reconstruction below this as a zero
PCA_ZERO_THRESHOLD = 0.5


@dataclass(frozen=True)
class ZeroInflatedOptions:
    """Controls for one run across ranks."""

    seed: int = 0
    ranks: list[int] = field(default_factory=lambda: list(range(1, 11)))
    n: int = ZERO_INFLATED_N_ROWS
    p: int = ZERO_INFLATED_N_COLUMNS
    zero_rates: list[float] | None = None
    max_sweeps: int | None = None


@dataclass
class RankOutcome:
    k: int
    hurdle_loss_explained: float
    pca_loss_explained: float
    hurdle_weighted_sse: float
    pca_weighted_sse: float
    hurdle_misclassification: float
    pca_misclassification: float


def hurdle_count_table(counts: np.ndarray) -> DataTable:
    """Every column a full zero hurdle with a Poisson value loss."""
    columns = [
        ColumnSpec(name=f"a{j + 1}", loss=HurdleSpec(nu=0.0, g_loss=poisson()))
        for j in range(counts.shape[1])
    ]
    return DataTable(columns=columns, values=counts)


def hurdle_zero_predictions(table: DataTable, fact) -> np.ndarray:
    """1 where the nu-probability exceeds 1/2 (predicted zero), 0 elsewhere."""
    return np.column_stack(
        [np.where(nu_scores(fact, name) > 0.5, 0.0, 1.0) for name in table.names]
    )


def run_rank(
    table: DataTable, counts: np.ndarray, k: int, options: ZeroInflatedOptions
) -> RankOutcome:
    update = {"k": k, "seed": options.seed}
    if options.max_sweeps is not None:
        update["max_sweeps"] = options.max_sweeps
    config = FitConfig(**update)
    sd = column_sd(counts)

    with logfire.span("zero_inflated_fig1 rank", k=k):
        fact, _ = fit(table, config)
        reconstruction = reconstruct_table(table, fact)
        pca = pca_glrm(counts, k, config=config)

    return RankOutcome(
        k=k,
        hurdle_loss_explained=loss_explained(table, config, fact),
        pca_loss_explained=pca.loss_explained,
        hurdle_weighted_sse=weighted_sse(counts, reconstruction, sd),
        pca_weighted_sse=weighted_sse(counts, pca.reconstruction, sd),
        hurdle_misclassification=misclassification_rate(
            counts, hurdle_zero_predictions(table, fact), nu=0.0
        ),
        pca_misclassification=misclassification_rate(
            counts, pca.reconstruction, nu=0.0, threshold=PCA_ZERO_THRESHOLD
        ),
    )


def write_outputs(
    outcomes: list[RankOutcome], realised_zero_rates: list[float], out: Path
) -> list[str]:
    out.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame([vars(o) for o in outcomes])
    for metric in ("loss_explained", "weighted_sse", "misclassification"):
        curve = frame[["k", f"hurdle_{metric}", f"pca_{metric}"]].rename(
            columns={f"hurdle_{metric}": "hurdle", f"pca_{metric}": "pca"}
        )
        write_frame(out / f"{metric}.csv", curve)
    write_json(
        out / "metrics.json",
        {
            "ranks": [o.k for o in outcomes],
            "realised_zero_rates": realised_zero_rates,
            "curves": [vars(o) for o in outcomes],
        },
    )
    return ["loss_explained.csv", "weighted_sse.csv", "misclassification.csv", "metrics.json"]


def run(options: ZeroInflatedOptions, out: Path) -> tuple[list[RankOutcome], list[str]]:
    if not options.ranks or min(options.ranks) < 1 or max(options.ranks) >= options.p:
        raise ConfigError(f"ranks must lie in [1, {options.p - 1}], got {options.ranks}")

    with logfire.span("zero_inflated_fig1", seed=options.seed, ranks=options.ranks):
        bundle = simulate_zero_inflated(
            options.seed, n=options.n, p=options.p, zero_rates=options.zero_rates
        )
        table = calibrate(hurdle_count_table(bundle.counts))
        outcomes = [run_rank(table, bundle.counts, k, options) for k in sorted(options.ranks)]
        files = write_outputs(outcomes, bundle.realised_zero_rates, out)
    return outcomes, files
