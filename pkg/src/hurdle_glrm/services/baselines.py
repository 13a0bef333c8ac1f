"""Comparison imputation methods: sample mean, NIPALS, and quadratic GLRMs."""

import logfire
import numpy as np

from hurdle_glrm.errors import ConfigError, DegenerateColumnError
from hurdle_glrm.models.baseline import BaselineResult
from hurdle_glrm.models.fit_config import FitConfig
from hurdle_glrm.models.loss import quadratic
from hurdle_glrm.models.table import ColumnSpec, DataTable

from . import diagnostics
from .solver import calibrate, fit, reconstruct_table

TableLike = DataTable | np.ndarray


def _numeric(table: TableLike) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """(values, observed mask, column names) of a table or NaN-marked matrix."""
    if isinstance(table, DataTable):
        return table.values, table.observed, table.names
    values = np.asarray(table, dtype=float)
    if values.ndim != 2:
        raise ConfigError(f"expected a 2-D table, got {values.ndim} dims")
    return values, ~np.isnan(values), [f"a{j + 1}" for j in range(values.shape[1])]


def _observed_means(values: np.ndarray, observed: np.ndarray, names: list[str]) -> np.ndarray:
    counts = observed.sum(axis=0)
    empty = [names[j] for j in np.flatnonzero(counts == 0)]
    if empty:
        raise DegenerateColumnError(f"columns with no observed values: {empty}")
    return np.where(observed, values, 0.0).sum(axis=0) / counts


def score_imputation(
    method: str,
    imputed: np.ndarray,
    observed: np.ndarray,
    truth: np.ndarray | None = None,
    true_offsets: np.ndarray | None = None,
    loadings: np.ndarray | None = None,
    reconstruction: np.ndarray | None = None,
    loss_explained: float | None = None,
) -> BaselineResult:
    """Attach imputation and offset MSEs to an imputed table.

    The offset estimate of each column is the mean of its completed values;
    both MSEs are taken over the columns (and entries) that were missing.
    """
    offsets = imputed.mean(axis=0)
    missing = ~observed
    imputation_mse = offset_mse = None
    if missing.any():
        if truth is not None:
            imputation_mse = float(np.mean((imputed[missing] - truth[missing]) ** 2))
        if true_offsets is not None:
            affected = missing.any(axis=0)
            offset_mse = float(np.mean((offsets[affected] - true_offsets[affected]) ** 2))
    return BaselineResult(
        method=method,
        imputed=imputed,
        offsets=offsets,
        imputation_mse=imputation_mse,
        offset_mse=offset_mse,
        loadings=loadings,
        reconstruction=reconstruction,
        loss_explained=loss_explained,
    )


def mean_impute(
    table: TableLike,
    truth: np.ndarray | None = None,
    true_offsets: np.ndarray | None = None,
) -> BaselineResult:
    """Replace every missing entry with its column's observed mean."""
    values, observed, names = _numeric(table)
    means = _observed_means(values, observed, names)
    imputed = np.where(observed, values, means)
    return score_imputation("sample_mean", imputed, observed, truth, true_offsets)


def nipals_fit(
    table: TableLike,
    k: int,
    max_iter: int = 500,
    tol: float = 1e-12,
    truth: np.ndarray | None = None,
    true_offsets: np.ndarray | None = None,
) -> BaselineResult:
    """Missing-aware NIPALS PCA.

    Columns are centred on their observed means, then k components are
    extracted one at a time; inner regressions run over observed entries
    only and each component is deflated before the next. A component that
    does not settle within ``max_iter`` is logged and kept at its last
    iterate.
    """
    values, observed, names = _numeric(table)
    n, p = values.shape
    if not 1 <= k <= p:
        raise ConfigError(f"NIPALS rank must lie in [1, {p}], got {k}")
    means = _observed_means(values, observed, names)
    weights = observed.astype(float)
    residual = np.where(observed, values - means, 0.0)

    scores = np.zeros((n, k))
    loadings = np.zeros((p, k))
    with logfire.span("nipals", k=k, n_rows=n):
        for component in range(k):
            t = residual[:, int(np.argmax((residual**2).sum(axis=0)))].copy()
            if not np.any(t):
                break
            for iteration in range(max_iter):
                load = (residual.T @ t) / np.maximum(weights.T @ (t**2), 1e-300)
                norm = np.linalg.norm(load)
                if norm == 0:
                    break
                load /= norm
                t_new = (residual @ load) / np.maximum(weights @ (load**2), 1e-300)
                change = float(np.sum((t_new - t) ** 2))
                t = t_new
                if change <= tol * max(float(np.sum(t**2)), 1e-300):
                    break
            else:
                logfire.warning(
                    "NIPALS component did not converge",
                    component=component,
                    max_iter=max_iter,
                    change=change,
                )
            scores[:, component] = t
            loadings[:, component] = load
            residual -= weights * np.outer(t, load)

    reconstruction = means + scores @ loadings.T
    imputed = np.where(observed, values, reconstruction)
    return score_imputation(
        "nipals",
        imputed,
        observed,
        truth,
        true_offsets,
        loadings=loadings,
        reconstruction=reconstruction,
    )


def _quadratic_table(values: np.ndarray, observed: np.ndarray, names: list[str]) -> DataTable:
    columns = [ColumnSpec(name=name, loss=quadratic()) for name in names]
    return DataTable(columns=columns, values=np.where(observed, values, np.nan), observed=observed)


def _quadratic_glrm(
    method: str,
    table: TableLike,
    k: int,
    gamma: float,
    config: FitConfig | None,
    truth: np.ndarray | None,
    true_offsets: np.ndarray | None,
) -> BaselineResult:
    values, observed, names = _numeric(table)
    if k >= values.shape[1]:
        # Saturated model: observed entries are fitted exactly and missing
        # entries are left at their column offsets.
        means = _observed_means(values, observed, names)
        imputed = np.where(observed, values, means)
        return score_imputation(
            method, imputed, observed, truth, true_offsets, reconstruction=imputed, loss_explained=1.0
        )

    calibrated = calibrate(_quadratic_table(values, observed, names))
    config = (config or FitConfig(k=k)).model_copy(
        update={"k": k, "gamma_x": gamma, "gamma_y": gamma, "mar_offset_columns": []}
    )
    fact, _ = fit(calibrated, config)
    reconstruction = reconstruct_table(calibrated, fact)
    imputed = np.where(observed, values, reconstruction)
    return score_imputation(
        method,
        imputed,
        observed,
        truth,
        true_offsets,
        loadings=fact.Y,
        reconstruction=reconstruction,
        loss_explained=diagnostics.loss_explained(calibrated, config, fact),
    )


def pca_glrm(
    table: TableLike,
    k: int,
    config: FitConfig | None = None,
    truth: np.ndarray | None = None,
    true_offsets: np.ndarray | None = None,
) -> BaselineResult:
    """PCA as the unregularized quadratic GLRM on offset-and-scale calibrated columns."""
    return _quadratic_glrm("pca", table, k, 0.0, config, truth, true_offsets)


def quadratic_glrm(
    table: TableLike,
    k: int,
    gamma: float,
    config: FitConfig | None = None,
    truth: np.ndarray | None = None,
    true_offsets: np.ndarray | None = None,
) -> BaselineResult:
    """The quadratically regularized quadratic GLRM, without hurdle structure."""
    if gamma < 0:
        raise ConfigError(f"gamma must be nonnegative, got {gamma}")
    return _quadratic_glrm("quadratic_glrm", table, k, gamma, config, truth, true_offsets)
