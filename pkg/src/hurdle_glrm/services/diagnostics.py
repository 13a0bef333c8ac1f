"""Model quality metrics."""

import logfire
import numpy as np
from scipy.special import expit
from scipy.stats import mannwhitneyu
from sklearn.metrics import auc as trapezoid_auc
from sklearn.metrics import roc_curve

from hurdle_glrm.errors import ConfigError, DegenerateColumnError, DomainError
from hurdle_glrm.models.diagnostics import AssociationRow
from hurdle_glrm.models.factorization import Factorization
from hurdle_glrm.models.fit_config import FitConfig
from hurdle_glrm.models.table import DataTable

from .solver import data_loss, normalizer_total


def loss_explained(table: DataTable, config: FitConfig, fact: Factorization) -> float:
    """1 - (unregularized data loss) / sum_j (n_j - 1)."""
    return 1.0 - data_loss(table, fact) / normalizer_total(table)


def column_sd(values: np.ndarray, observed: np.ndarray | None = None) -> np.ndarray:
    """Sample standard deviation of the observed entries of every column."""
    values = np.asarray(values, dtype=float)
    if observed is not None:
        values = np.where(observed, values, np.nan)
    return np.nanstd(values, axis=0, ddof=1)


def weighted_sse(
    original: np.ndarray,
    reconstructed: np.ndarray,
    column_sd: np.ndarray,
    observed: np.ndarray | None = None,
) -> float:
    """Sum over observed entries of ((reconstructed - original) / sd_j)^2."""
    original = np.asarray(original, dtype=float)
    reconstructed = np.asarray(reconstructed, dtype=float)
    sd = np.asarray(column_sd, dtype=float)
    if original.shape != reconstructed.shape:
        raise DomainError(f"shape mismatch: {original.shape} vs {reconstructed.shape}")
    if np.any(~(sd > 0)):
        raise DegenerateColumnError(
            f"column standard deviations must be positive (column {int(np.argmin(sd > 0))})"
        )
    if observed is None:
        observed = ~np.isnan(original)
    residual = np.where(observed, (reconstructed - original) / sd, 0.0)
    return float(np.sum(residual**2))


def misclassification_rate(
    original: np.ndarray,
    reconstructed: np.ndarray,
    nu: float = 0.0,
    threshold: float | None = None,
    observed: np.ndarray | None = None,
) -> float:
    """Share of observed entries whose nu-indicator the reconstruction gets wrong.

    With ``threshold`` set, any reconstruction below it counts as predicting
    nu; this is how a plain numeric reconstruction is read for nu = 0.
    """
    original = np.asarray(original, dtype=float)
    reconstructed = np.asarray(reconstructed, dtype=float)
    if original.shape != reconstructed.shape:
        raise DomainError(f"shape mismatch: {original.shape} vs {reconstructed.shape}")
    if observed is None:
        observed = ~np.isnan(original)
    actual = original == nu
    predicted = reconstructed < threshold if threshold is not None else reconstructed == nu
    n = int(np.count_nonzero(observed))
    if n == 0:
        raise DomainError("no observed entries to score")
    return float(np.count_nonzero((actual != predicted) & observed) / n)


def roc_auc(scores, labels) -> tuple[np.ndarray, float]:
    """ROC curve as (fpr, tpr) rows from (0, 0) to (1, 1), and its trapezoid AUC."""
    scores = np.asarray(scores, dtype=float).ravel()
    labels = np.asarray(labels).ravel().astype(int)
    if scores.shape != labels.shape:
        raise DomainError(f"{scores.size} scores but {labels.size} labels")
    if not set(np.unique(labels)) <= {0, 1}:
        raise DomainError("labels must be 0 or 1")
    if np.unique(labels).size < 2:
        raise DomainError("ROC needs at least one positive and one negative label")
    fpr, tpr, _ = roc_curve(labels, scores, drop_intermediate=False)
    return np.column_stack([fpr, tpr]), float(trapezoid_auc(fpr, tpr))


def nu_scores(fact: Factorization, column: str) -> np.ndarray:
    """Estimated Pr[a = nu] per row from a hurdle column's binary score."""
    index = _resolve_embedded(fact, column)
    return expit(fact.X @ fact.Y[:, index] + fact.mu[index])


def _resolve_embedded(fact: Factorization, name: str) -> int:
    try:
        return fact.embedded_index(f"{name}:binary")
    except KeyError:
        pass
    try:
        return fact.embedded_index(name)
    except KeyError:
        raise ConfigError(
            f"Unknown binary column '{name}'. Embedded columns: {fact.embedded_names}"
        )


def column_association(
    fact: Factorization, binary_column: str, include_self: bool = False
) -> list[AssociationRow]:
    """Angle score and distance of every other embedded column to the nu column.

    theta = 1 - arccos(cos)/pi and d = 1 - 2|theta - 1/2|; small d means the
    column moves with (or against) nu occurrence. Rows come back sorted by
    d, undefined associations last. ``include_self`` adds the nu column's own
    row (theta 1, d 0 unless its loadings are zero).
    """
    index = _resolve_embedded(fact, binary_column)
    target = fact.Y[:, index]
    target_norm = np.linalg.norm(target)
    rows: list[AssociationRow] = []
    for other, name in enumerate(fact.embedded_names):
        if other == index and not include_self:
            continue
        column = fact.Y[:, other]
        norm = np.linalg.norm(column)
        if target_norm == 0 or norm == 0:
            logfire.warning("Undefined association", column=name, binary_column=binary_column)
            rows.append(AssociationRow.from_theta(name, None))
            continue
        cosine = float(np.clip(target @ column / (target_norm * norm), -1.0, 1.0))
        rows.append(AssociationRow.from_theta(name, 1.0 - np.arccos(cosine) / np.pi))
    return sorted(rows, key=lambda r: (r.distance is None, r.distance or 0.0))


def separation_score(observed, missing) -> tuple[float, float]:
    """(rho, rho * (1 - rho)) with rho = Pr[observed value > missing value], ties 1/2."""
    observed = np.asarray(observed, dtype=float).ravel()
    missing = np.asarray(missing, dtype=float).ravel()
    if observed.size == 0 or missing.size == 0:
        raise DomainError("separation needs observed and missing values")
    u = mannwhitneyu(observed, missing, alternative="two-sided").statistic
    rho = float(u) / (observed.size * missing.size)
    return rho, rho * (1.0 - rho)
