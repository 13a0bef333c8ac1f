"""Missing-data imputation study on simulated low-rank Gaussian tables.

For every seed a bundle is simulated, then for each missingness case
(MCAR, MAR) the full hurdle model with missingness as nu is fitted on
column a1 next to the comparison methods. Results are averaged over seeds
after all seeds finish.
"""

from dataclasses import dataclass, field
from pathlib import Path

import logfire
import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from hurdle_glrm.config.constants import MAR_TRUE_RANK
from hurdle_glrm.config.settings import settings
from hurdle_glrm.models.diagnostics import AssociationRow
from hurdle_glrm.models.fit_config import FitConfig
from hurdle_glrm.models.hurdle import HurdleSpec
from hurdle_glrm.models.loss import quadratic
from hurdle_glrm.models.report import MethodSummary
from hurdle_glrm.models.simulation import MarDatasetBundle, MissingCase
from hurdle_glrm.models.table import ColumnSpec, DataTable
from hurdle_glrm.services.baselines import (
    mean_impute,
    nipals_fit,
    quadratic_glrm,
    score_imputation,
)
from hurdle_glrm.services.diagnostics import (
    column_association,
    loss_explained,
    nu_scores,
    roc_auc,
    separation_score,
)
from hurdle_glrm.services.simgen import simulate_mar_dataset
from hurdle_glrm.services.solver import calibrate, fit, impute_table, select_gamma
from hurdle_glrm.services.storage import write_csv, write_frame, write_json

HURDLE_COLUMN = "a1"
# Columns whose values drive MAR selection
INFLUENTIAL_COLUMNS = ("a2", "a3")
CASES: tuple[MissingCase, ...] = ("mcar", "mar")


@dataclass(frozen=True)
class MarTable1Options:
    """Controls for one run of the study."""

    seeds: list[int]
    rank: int = MAR_TRUE_RANK
    gamma: float | None = None  # None = select from gamma_grid per dataset
    gamma_grid: list[float] | None = None
    max_sweeps: int | None = None


@dataclass
class CaseOutcome:
    """Everything measured on one (seed, case) pair."""

    case: MissingCase
    gamma: float
    auc: float
    roc: np.ndarray
    loss_explained: float
    associations: list[AssociationRow]
    results: dict[str, tuple[float | None, float | None]] = field(default_factory=dict)


@dataclass
class SeedOutcome:
    seed: int
    cases: dict[str, CaseOutcome]
    rho: float
    overlap: float


def hurdle_table(values: np.ndarray) -> DataTable:
    """Column a1 as a full missing-nu hurdle with quadratic values, the rest quadratic."""
    p = values.shape[1]
    columns = [
        ColumnSpec(name=HURDLE_COLUMN, loss=HurdleSpec(nu="missing", g_loss=quadratic()))
    ] + [ColumnSpec(name=f"a{j + 1}", loss=quadratic()) for j in range(1, p)]
    return DataTable(columns=columns, values=values)


def _fit_config(options: MarTable1Options, seed: int) -> FitConfig:
    update = {"k": options.rank, "seed": seed, "mar_offset_columns": [HURDLE_COLUMN]}
    if options.max_sweeps is not None:
        update["max_sweeps"] = options.max_sweeps
    return FitConfig(**update)


def run_case(
    bundle: MarDatasetBundle, case: MissingCase, options: MarTable1Options
) -> CaseOutcome:
    values = bundle.masked_values(case)
    truth, true_mu = bundle.complete, bundle.truth_mu
    mask = bundle.mask(case)

    raw = hurdle_table(values)
    config = _fit_config(options, bundle.seed)
    gamma = options.gamma
    if gamma is None:
        gamma = select_gamma(raw, config, grid=options.gamma_grid, seed=bundle.seed)
    table = calibrate(raw)
    fact, _ = fit(table, config.with_gamma(gamma))

    imputed = impute_table(table, fact)
    hurdle = score_imputation("hurdle", imputed, table.observed, truth, true_mu)
    curve, auc = roc_auc(nu_scores(fact, HURDLE_COLUMN), mask.astype(int))

    results = {"hurdle": (hurdle.imputation_mse, hurdle.offset_mse)}
    for result in (
        mean_impute(values, truth, true_mu),
        nipals_fit(values, options.rank, truth=truth, true_offsets=true_mu),
        quadratic_glrm(values, options.rank, gamma, config=config, truth=truth, true_offsets=true_mu),
    ):
        results[result.method] = (result.imputation_mse, result.offset_mse)

    return CaseOutcome(
        case=case,
        gamma=gamma,
        auc=auc,
        roc=curve,
        loss_explained=loss_explained(table, config, fact),
        associations=column_association(fact, HURDLE_COLUMN),
        results=results,
    )


def run_seed(seed: int, options: MarTable1Options) -> SeedOutcome:
    with logfire.span("mar_table1 seed", seed=seed):
        bundle = simulate_mar_dataset(seed)
        cases = {case: run_case(bundle, case, options) for case in CASES}
        observed = bundle.complete[~bundle.mar_mask, 0]
        missing = bundle.complete[bundle.mar_mask, 0]
        rho, overlap = separation_score(observed, missing)
    return SeedOutcome(seed=seed, cases=cases, rho=rho, overlap=overlap)


def run_seeds(options: MarTable1Options) -> list[SeedOutcome]:
    """Run every seed (fanned out over ``settings.n_jobs`` workers)."""
    return Parallel(n_jobs=settings.n_jobs)(
        delayed(run_seed)(seed, options) for seed in options.seeds
    )


# ---------------------------------------------------------------------------
# Aggregation
# ---------------------------------------------------------------------------


def per_seed_frame(outcomes: list[SeedOutcome]) -> pd.DataFrame:
    rows = [
        {
            "seed": o.seed,
            "case": case,
            "method": method,
            "imputation_mse": mse,
            "offset_mse": offset,
        }
        for o in outcomes
        for case, outcome in o.cases.items()
        for method, (mse, offset) in outcome.results.items()
    ]
    return pd.DataFrame(rows)


def summarize(outcomes: list[SeedOutcome]) -> list[MethodSummary]:
    """Average imputation and offset MSE per (case, method)."""
    frame = per_seed_frame(outcomes)
    grouped = frame.groupby(["case", "method"], sort=False).agg(
        average_imputation_mse=("imputation_mse", "mean"),
        average_offset_mse=("offset_mse", "mean"),
        n_seeds=("seed", "nunique"),
    )
    return [
        MethodSummary(case=case, method=method, **row)
        for (case, method), row in grouped.to_dict(orient="index").items()
    ]


def association_hit_rate(outcomes: list[SeedOutcome], top: int, case: str = "mar") -> float:
    """Share of seeds with an influential column among the ``top`` smallest distances."""
    hits = 0
    for outcome in outcomes:
        leading = [row.column for row in outcome.cases[case].associations[:top]]
        hits += any(name in leading for name in INFLUENTIAL_COLUMNS)
    return hits / len(outcomes)


def _improvement(outcome: SeedOutcome, method: str) -> float:
    baseline = outcome.cases["mar"].results[method][0]
    hurdle = outcome.cases["mar"].results["hurdle"][0]
    return 100.0 * (baseline - hurdle) / baseline


def metrics(outcomes: list[SeedOutcome]) -> dict:
    return {
        "n_seeds": len(outcomes),
        "average_auc": {
            case: float(np.mean([o.cases[case].auc for o in outcomes])) for case in CASES
        },
        "average_loss_explained": {
            case: float(np.mean([o.cases[case].loss_explained for o in outcomes]))
            for case in CASES
        },
        "association_top2_rate": association_hit_rate(outcomes, 2),
        "association_top3_rate": association_hit_rate(outcomes, 3),
        "gamma": {
            case: [o.cases[case].gamma for o in outcomes] for case in CASES
        },
        "table1": [s.model_dump() for s in summarize(outcomes)],
    }


def write_outputs(outcomes: list[SeedOutcome], out: Path) -> list[str]:
    """Write every registered output file; returns the file names."""
    out.mkdir(parents=True, exist_ok=True)
    outcomes = sorted(outcomes, key=lambda o: o.seed)

    write_frame(out / "table1.csv", pd.DataFrame([s.model_dump() for s in summarize(outcomes)]))
    write_frame(out / "per_seed.csv", per_seed_frame(outcomes))
    write_frame(
        out / "auc.csv",
        pd.DataFrame(
            [
                {"seed": o.seed, "case": case, "auc": o.cases[case].auc}
                for o in outcomes
                for case in CASES
            ]
        ),
    )
    for case in CASES:
        write_csv(out / f"roc_{case}.csv", outcomes[0].cases[case].roc, ["fpr", "tpr"])
    write_frame(
        out / "associations.csv",
        pd.DataFrame(
            [
                {
                    "seed": o.seed,
                    "case": case,
                    "rank": rank + 1,
                    "column": row.column,
                    "theta": row.theta,
                    "distance": row.distance,
                }
                for o in outcomes
                for case in CASES
                for rank, row in enumerate(o.cases[case].associations)
            ]
        ),
    )
    write_frame(
        out / "separation.csv",
        pd.DataFrame(
            [
                {
                    "seed": o.seed,
                    "rho": o.rho,
                    "overlap": o.overlap,
                    "improvement_vs_quadratic_glrm": _improvement(o, "quadratic_glrm"),
                    "improvement_vs_nipals": _improvement(o, "nipals"),
                }
                for o in outcomes
            ]
        ),
    )
    write_json(out / "metrics.json", metrics(outcomes))
    return [
        "table1.csv",
        "per_seed.csv",
        "auc.csv",
        "roc_mcar.csv",
        "roc_mar.csv",
        "associations.csv",
        "separation.csv",
        "metrics.json",
    ]


def run(options: MarTable1Options, out: Path) -> tuple[list[SeedOutcome], list[str]]:
    with logfire.span("mar_table1", seeds=len(options.seeds)):
        outcomes = run_seeds(options)
        files = write_outputs(outcomes, out)
    return outcomes, files
