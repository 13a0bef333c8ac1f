"""Alternating damped-Newton fitting of generalized low-rank models.

Each sweep updates every row of X with Y held fixed, then every embedded
column of Y with X held fixed, then refreshes the requested offsets. Rows
(and embedded columns) are separable given the other factor, so every
block takes its own Newton step and its own step-halving line search; the
sweep objective therefore never increases.
"""

import math
from dataclasses import dataclass

import logfire
import numpy as np
from joblib import Parallel, delayed

from hurdle_glrm.config.constants import MCAR_RATE
from hurdle_glrm.config.settings import settings
from hurdle_glrm.errors import ConfigError, NumericFailure
from hurdle_glrm.models.factorization import Factorization, embedded_layout
from hurdle_glrm.models.fit_config import FitConfig
from hurdle_glrm.models.hurdle import HurdleMode, HurdleSpec
from hurdle_glrm.models.loss import LossKind
from hurdle_glrm.models.table import ColumnSpec, DataTable

from .hurdle import encode_indicator, reconstruct_terms, solve_hurdle_weights, value_reconstruct
from .loss_catalog import argmin_unchecked, derivatives, evaluate, loss_offset, loss_scale

# ---------------------------------------------------------------------------
# Calibration
# ---------------------------------------------------------------------------


def _hurdle_values(table: DataTable, j: int) -> np.ndarray:
    """Entries counted in n_j: every row for missing-nu, observed rows otherwise."""
    column = table.columns[j]
    if column.loss.nu_is_missing:
        return np.where(table.observed[:, j], table.values[:, j], np.nan)
    return table.values[table.observed[:, j], j]


def calibrate(table: DataTable, c_multiplier: dict[str, float] | None = None) -> DataTable:
    """Fill every column's offsets and scales so the offset-only loss is sum(n_j - 1)."""
    c_multiplier = c_multiplier or {}
    unknown = sorted(set(c_multiplier) - set(table.names))
    if unknown:
        raise ConfigError(f"c multipliers given for unknown columns {unknown}")

    columns: list[ColumnSpec] = []
    with logfire.span("calibrate", n_rows=table.n_rows, n_columns=len(table.columns)):
        for j, column in enumerate(table.columns):
            if column.is_hurdle:
                spec: HurdleSpec = column.loss
                c = c_multiplier.get(column.name, column.c_multiplier)
                lambda1, lambda2, (mu_b, mu_g) = solve_hurdle_weights(
                    _hurdle_values(table, j),
                    spec.nu,
                    c=c,
                    binary_loss=spec.binary_loss,
                    g_loss=spec.g_loss,
                    mode=spec.mode,
                    column=column.name,
                )
                offset = (mu_b, mu_g) if spec.mode is HurdleMode.FULL else (mu_g,)
                calibrated = column.model_copy(
                    update={
                        "loss": spec.model_copy(update={"lambda1": lambda1, "lambda2": lambda2}),
                        "offset": offset,
                        "scale": 1.0,
                    }
                )
                logfire.info(
                    "Calibrated hurdle column",
                    column=column.name,
                    lambda1=lambda1,
                    lambda2=lambda2,
                    offset=list(offset),
                )
            else:
                observed = table.values[table.observed[:, j], j]
                mu = loss_offset(column.loss, observed, column=column.name)
                sigma2 = loss_scale(column.loss, mu, observed, column=column.name)
                calibrated = column.model_copy(update={"offset": (mu,), "scale": sigma2})
                logfire.info(
                    "Calibrated column", column=column.name, offset=mu, scale=sigma2
                )
            columns.append(calibrated)
    return table.with_columns(columns)


def normalizer_total(table: DataTable) -> float:
    """sum_j (n_j - 1), the offset-only loss of a calibrated table."""
    total = 0
    for j, column in enumerate(table.columns):
        if column.is_hurdle and column.loss.nu_is_missing:
            n_j = table.n_rows
        else:
            n_j = int(np.count_nonzero(table.observed[:, j]))
        total += n_j - 1
    return float(total)


# ---------------------------------------------------------------------------
# Compiled column blocks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Block:
    """Masks and safe targets for one column, ready for repeated evaluation."""

    name: str
    span: slice
    kind: LossKind
    scale: float
    hurdle: HurdleSpec | None
    value_mask: np.ndarray
    targets: np.ndarray
    binary_mask: np.ndarray | None = None
    indicator: np.ndarray | None = None

    def losses(self, z: np.ndarray) -> np.ndarray:
        value = np.where(self.value_mask, evaluate(self.kind, z[:, -1], self.targets), 0.0)
        if self.hurdle is None:
            return (value / self.scale)[:, None]
        binary = np.where(
            self.binary_mask, evaluate(LossKind.LOGISTIC, z[:, 0], self.indicator), 0.0
        )
        binary, value = self.hurdle.lambda1 * binary, self.hurdle.lambda2 * value
        if self.hurdle.mode is HurdleMode.REDUCED:
            return (binary + value)[:, None]
        return np.stack([binary, value], axis=1)

    def derivatives(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        grad, curv = derivatives(self.kind, z[:, -1], self.targets)
        grad = np.where(self.value_mask, grad, 0.0)
        curv = np.where(self.value_mask, curv, 0.0)
        if self.hurdle is None:
            return (grad / self.scale)[:, None], (curv / self.scale)[:, None]
        grad_b, curv_b = derivatives(LossKind.LOGISTIC, z[:, 0], self.indicator)
        grad_b = self.hurdle.lambda1 * np.where(self.binary_mask, grad_b, 0.0)
        curv_b = self.hurdle.lambda1 * np.where(self.binary_mask, curv_b, 0.0)
        grad, curv = self.hurdle.lambda2 * grad, self.hurdle.lambda2 * curv
        if self.hurdle.mode is HurdleMode.REDUCED:
            return (grad_b + grad)[:, None], (curv_b + curv)[:, None]
        return np.stack([grad_b, grad], axis=1), np.stack([curv_b, curv], axis=1)


class CompiledTable:
    """A calibrated table flattened into per-column blocks over the embedded space."""

    def __init__(self, table: DataTable):
        if not table.is_calibrated:
            missing = [c.name for c in table.columns if not c.is_calibrated]
            raise ConfigError(f"table must be calibrated before fitting; uncalibrated: {missing}")
        self.table = table
        self.layout, self.embedded_names = embedded_layout(table.columns)
        self.mu = np.array([m for c in table.columns for m in c.offset], dtype=float)
        self.blocks = [self._block(table, j) for j in range(len(table.columns))]

    @property
    def d(self) -> int:
        return self.mu.size

    def _block(self, table: DataTable, j: int) -> _Block:
        column = table.columns[j]
        start, stop = self.layout[column.name]
        observed = table.observed[:, j]
        raw = table.values[:, j]
        value_loss = column.value_loss
        filler = value_loss.min_target if value_loss.min_target is not None else 1.0
        if value_loss.kind is LossKind.LOGISTIC:
            filler = 1.0
        if not column.is_hurdle:
            mask = observed
            return _Block(
                name=column.name,
                span=slice(start, stop),
                kind=value_loss.kind,
                scale=column.scale,
                hurdle=None,
                value_mask=mask,
                targets=np.where(mask, raw, filler),
            )

        spec: HurdleSpec = column.loss
        if spec.nu_is_missing:
            binary_mask = np.ones_like(observed)
            indicator = np.where(observed, -1.0, 1.0)
            value_mask = observed
        else:
            binary_mask = observed
            indicator = np.where(observed, encode_indicator(np.where(observed, raw, 0.0), spec.nu), -1.0)
            value_mask = observed & (indicator < 0)
        return _Block(
            name=column.name,
            span=slice(start, stop),
            kind=value_loss.kind,
            scale=1.0,
            hurdle=spec,
            value_mask=value_mask,
            targets=np.where(value_mask, raw, filler),
            binary_mask=binary_mask,
            indicator=indicator,
        )

    def losses(self, Z: np.ndarray) -> np.ndarray:
        """Per-entry scaled losses, n x d, zero wherever an entry does not count."""
        return np.hstack([b.losses(Z[:, b.span]) for b in self.blocks])

    def derivatives(self, Z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        parts = [b.derivatives(Z[:, b.span]) for b in self.blocks]
        return np.hstack([g for g, _ in parts]), np.hstack([h for _, h in parts])

    def block(self, name: str) -> _Block:
        for b in self.blocks:
            if b.name == name:
                return b
        raise ConfigError(f"Unknown column '{name}'. Known columns: {self.table.names}")


# ---------------------------------------------------------------------------
# Objective
# ---------------------------------------------------------------------------


def data_loss(table: DataTable, fact: Factorization) -> float:
    """Unregularized scaled loss over the counted entries."""
    compiled = CompiledTable(table)
    _check_shapes(compiled, fact)
    return float(compiled.losses(fact.scores()).sum())


def objective(table: DataTable, config: FitConfig, fact: Factorization) -> float:
    """Data loss plus gamma_x * ||X||^2 + gamma_y * ||Y||^2."""
    return (
        data_loss(table, fact)
        + config.gamma_x * float(np.sum(fact.X**2))
        + config.gamma_y * float(np.sum(fact.Y**2))
    )


def _check_shapes(compiled: CompiledTable, fact: Factorization) -> None:
    if fact.X.shape[0] != compiled.table.n_rows or fact.d != compiled.d:
        raise ConfigError(
            f"factorization is {fact.X.shape[0]} x {fact.d} but the table embeds as "
            f"{compiled.table.n_rows} x {compiled.d}"
        )


def offset_only(table: DataTable, k: int) -> Factorization:
    """The X = 0 factorization: every score equals its column offset."""
    compiled = CompiledTable(table)
    return Factorization(
        X=np.zeros((table.n_rows, k)),
        Y=np.zeros((k, compiled.d)),
        mu=compiled.mu,
        column_layout=compiled.layout,
        embedded_names=compiled.embedded_names,
    )


# ---------------------------------------------------------------------------
# Block Newton updates
# ---------------------------------------------------------------------------


def _damped(
    params: np.ndarray,
    step: np.ndarray,
    before: np.ndarray,
    objective_of,
    budget: int,
) -> np.ndarray:
    """Per-block step halving: a block moves only if its objective does not rise."""
    scale = np.ones(params.shape[0])
    accepted = np.zeros(params.shape[0], dtype=bool)
    result = params.copy()
    for _ in range(budget + 1):
        trial = params - scale[:, None] * step
        with np.errstate(over="ignore", invalid="ignore"):
            after = objective_of(trial)
        ok = ~accepted & (after <= before)
        result[ok] = trial[ok]
        accepted |= ok
        if accepted.all():
            break
        scale[~accepted] *= 0.5
    return result


def _newton_steps(grad: np.ndarray, hess: np.ndarray, shift: float, radius: float) -> np.ndarray:
    """Per-block Newton steps, each shortened to norm at most ``radius``."""
    k = grad.shape[1]
    hess = hess + shift * np.eye(k)
    step = np.linalg.solve(hess, grad[..., None])[..., 0]
    norms = np.linalg.norm(step, axis=1)
    shrink = np.minimum(1.0, radius / np.maximum(norms, np.finfo(float).tiny))
    return step * shrink[:, None]


def _update_rows(
    compiled: CompiledTable, X: np.ndarray, Y: np.ndarray, mu: np.ndarray, config: FitConfig
) -> np.ndarray:
    gamma = config.gamma_x

    def row_objective(candidate: np.ndarray) -> np.ndarray:
        losses = compiled.losses(candidate @ Y + mu)
        return losses.sum(axis=1) + gamma * np.sum(candidate**2, axis=1)

    Z = X @ Y + mu
    G, H = compiled.derivatives(Z)
    grad = G @ Y.T + 2.0 * gamma * X
    hess = np.einsum("kd,nd,ld->nkl", Y, H, Y)
    step = _newton_steps(grad, hess, 2.0 * gamma + config.curvature_floor, config.trust_radius)
    return _damped(X, step, row_objective(X), row_objective, config.damping)


def _update_columns(
    compiled: CompiledTable, X: np.ndarray, Y: np.ndarray, mu: np.ndarray, config: FitConfig
) -> np.ndarray:
    gamma = config.gamma_y

    def column_objective(candidate_t: np.ndarray) -> np.ndarray:
        losses = compiled.losses(X @ candidate_t.T + mu)
        return losses.sum(axis=0) + gamma * np.sum(candidate_t**2, axis=1)

    Yt = Y.T
    Z = X @ Y + mu
    G, H = compiled.derivatives(Z)
    grad = G.T @ X + 2.0 * gamma * Yt
    hess = np.einsum("nk,nd,nl->dkl", X, H, X)
    step = _newton_steps(grad, hess, 2.0 * gamma + config.curvature_floor, config.trust_radius)
    return _damped(Yt, step, column_objective(Yt), column_objective, config.damping).T


# ---------------------------------------------------------------------------
# Offset refresh
# ---------------------------------------------------------------------------


def _refresh_target(compiled: CompiledTable, column: str) -> tuple[_Block, int]:
    block = compiled.block(column)
    if block.kind is not LossKind.QUADRATIC:
        raise ConfigError(f"offset refresh needs a quadratic value loss; '{column}' is {block.kind.value}")
    if block.hurdle is not None and block.hurdle.mode is HurdleMode.REDUCED:
        raise ConfigError(
            f"offset refresh is not defined for reduced hurdle column '{column}'"
        )
    return block, block.span.stop - 1


def _refreshed_offset(block: _Block, X: np.ndarray, Y: np.ndarray, index: int) -> float:
    mask = block.value_mask
    if not mask.any():
        raise ConfigError(f"column '{block.name}' has no observed entries to refresh from")
    residual = block.targets[mask] - X[mask] @ Y[:, index]
    return float(residual.mean())


def mar_offset_refresh(table: DataTable, fact: Factorization, column: str) -> float:
    """Mean residual a - x_i . y over the entries the column's value loss covers."""
    compiled = CompiledTable(table)
    _check_shapes(compiled, fact)
    block, index = _refresh_target(compiled, column)
    return _refreshed_offset(block, fact.X, fact.Y, index)


# ---------------------------------------------------------------------------
# Fitting
# ---------------------------------------------------------------------------


def _total(compiled: CompiledTable, X, Y, mu, config: FitConfig) -> float:
    with np.errstate(over="ignore", invalid="ignore"):
        data = float(compiled.losses(X @ Y + mu).sum())
    return data + config.gamma_x * float(np.sum(X**2)) + config.gamma_y * float(np.sum(Y**2))


def _converged(previous: float, current: float, rel_tol: float) -> bool:
    return previous - current <= rel_tol * max(abs(previous), 1e-300)


def _check_finite(value: float, sweep: int) -> None:
    if not np.isfinite(value):
        logfire.error("Objective is not finite", sweep=sweep)
        raise NumericFailure(f"objective became non-finite at sweep {sweep}")


def _alternate(
    compiled: CompiledTable,
    config: FitConfig,
    X: np.ndarray,
    Y: np.ndarray,
    update_columns: bool = True,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, list[float]]:
    mu = compiled.mu.copy()
    refresh = [_refresh_target(compiled, name) for name in config.mar_offset_columns]

    trace = [_total(compiled, X, Y, mu, config)]
    _check_finite(trace[0], 0)
    for sweep in range(1, config.max_sweeps + 1):
        X = _update_rows(compiled, X, Y, mu, config)
        if update_columns:
            Y = _update_columns(compiled, X, Y, mu, config)
            for block, index in refresh:
                mu[index] = _refreshed_offset(block, X, Y, index)
        current = _total(compiled, X, Y, mu, config)
        _check_finite(current, sweep)
        trace.append(current)
        if sweep % 25 == 0:
            logfire.info("Sweep", sweep=sweep, objective=current)
        if _converged(trace[-2], current, config.rel_tol):
            break
    return X, Y, mu, trace


def _fit_once(
    compiled: CompiledTable, config: FitConfig, seed: np.random.SeedSequence, restart: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray, list[float]]:
    rng = np.random.Generator(np.random.PCG64(seed))
    sd = 1.0 / np.sqrt(config.k)
    X = rng.normal(0.0, sd, size=(compiled.table.n_rows, config.k))
    Y = rng.normal(0.0, sd, size=(config.k, compiled.d))
    with logfire.span("fit restart", restart=restart, k=config.k):
        return _alternate(compiled, config, X, Y)


def fit(table: DataTable, config: FitConfig) -> tuple[Factorization, list[float]]:
    """Fit X, Y (and refreshed offsets) by alternating minimization.

    Returns the best factorization over ``config.restarts`` random starts and
    that start's objective trace; ``trace[0]`` is the objective at the
    starting point and the trace never increases.
    """
    compiled = CompiledTable(table)
    if config.k >= compiled.d:
        raise ConfigError(f"rank k={config.k} must be below the embedded dimension d={compiled.d}")
    for name in config.mar_offset_columns:
        _refresh_target(compiled, name)

    seeds = np.random.SeedSequence(config.seed).spawn(config.restarts)
    with logfire.span(
        "fit", k=config.k, gamma_x=config.gamma_x, gamma_y=config.gamma_y, restarts=config.restarts
    ):
        runs = Parallel(n_jobs=settings.n_jobs if config.restarts > 1 else 1)(
            delayed(_fit_once)(compiled, config, seed, restart)
            for restart, seed in enumerate(seeds)
        )
        best = min(range(len(runs)), key=lambda r: runs[r][3][-1])
        X, Y, mu, trace = runs[best]
        logfire.info("Fit finished", sweeps=len(trace) - 1, objective=trace[-1], restart=best)

    fact = Factorization(
        X=X, Y=Y, mu=mu, column_layout=compiled.layout, embedded_names=compiled.embedded_names
    )
    return fact, trace


def transform(table: DataTable, fact: Factorization, config: FitConfig) -> Factorization:
    """Scores for new rows with Y and mu held fixed.

    ``table`` must carry the calibration of the table ``fact`` was fitted on.
    """
    compiled = CompiledTable(table)
    if compiled.d != fact.d or compiled.layout != fact.column_layout:
        raise ConfigError("table layout does not match the factorization")
    compiled.mu = fact.mu.copy()
    X = np.zeros((table.n_rows, fact.k))
    frozen = config.model_copy(update={"mar_offset_columns": []})
    with logfire.span("transform", n_rows=table.n_rows, k=fact.k):
        X, _, _, _ = _alternate(compiled, frozen, X, fact.Y.copy(), update_columns=False)
    return fact.model_copy(update={"X": X})


# ---------------------------------------------------------------------------
# Reconstruction
# ---------------------------------------------------------------------------


def reconstruct_table(table: DataTable, fact: Factorization, impute: bool = False) -> np.ndarray:
    """Best domain value for every entry given the fitted scores.

    Plain columns take the loss argmin; hurdle columns follow the hurdle
    rule, which may return nu (NaN for a missing-nu column). With
    ``impute=True`` missing-nu columns always return the best non-nu value.
    """
    Z = fact.scores()
    out = np.empty((table.n_rows, len(table.columns)))
    for j, column in enumerate(table.columns):
        z = Z[:, fact.span(column.name)]
        if not column.is_hurdle:
            out[:, j] = argmin_unchecked(column.loss.kind, z[:, 0])
        elif impute and column.loss.nu_is_missing:
            out[:, j] = value_reconstruct(column.loss, z[:, -1])
        else:
            out[:, j] = reconstruct_terms(column.loss, z[:, 0], z[:, -1])
    return out


def impute_table(table: DataTable, fact: Factorization) -> np.ndarray:
    """The input values with every unobserved entry imputed."""
    filled = reconstruct_table(table, fact, impute=True)
    return np.where(table.observed, table.values, filled)


# ---------------------------------------------------------------------------
# Regularization selection
# ---------------------------------------------------------------------------


def _tuning_columns(table: DataTable) -> list[int]:
    hurdle = [
        j
        for j, c in enumerate(table.columns)
        if c.is_hurdle and c.loss.nu_is_missing and c.has_quadratic_values
    ]
    if hurdle:
        return hurdle
    plain = [
        j
        for j, c in enumerate(table.columns)
        if not c.is_hurdle and c.loss.kind is LossKind.QUADRATIC
    ]
    if not plain:
        raise ConfigError("gamma selection needs at least one quadratic column")
    return plain


def gamma_holdout_errors(
    table: DataTable,
    config: FitConfig,
    grid: list[float] | None = None,
    holdout_rate: float | None = None,
    seed: int | None = None,
    c_multiplier: dict[str, float] | None = None,
) -> dict[float, float]:
    """Held-out imputation MSE for every gamma in ``grid``.

    Rows missing in any tuning column are dropped, fresh entries of the tuning
    columns are hidden completely at random, the reduced table is
    recalibrated, and each gamma's fit imputes the hidden entries. A fit that
    fails numerically, or imputes the hidden entries worse than the column
    offsets do, is degenerate and scores ``inf``.
    """
    grid = settings.gamma_grid if grid is None else list(grid)
    if not grid:
        raise ConfigError("gamma grid is empty")
    if any(g < 0 for g in grid):
        raise ConfigError(f"gamma values must be nonnegative, got {grid}")
    seed = config.seed if seed is None else seed

    targets = _tuning_columns(table)
    complete_rows = table.observed[:, targets].all(axis=1)
    if holdout_rate is None:
        holdout_rate = settings.holdout_rate
    if holdout_rate is None:
        holdout_rate = float(1.0 - table.observed[:, targets].mean()) or MCAR_RATE
    if not 0 < holdout_rate < 1:
        raise ConfigError(f"holdout rate must lie in (0, 1), got {holdout_rate}")

    rng = np.random.Generator(np.random.PCG64(seed))
    values = table.values[complete_rows]
    observed = table.observed[complete_rows].copy()
    hidden = np.zeros_like(observed)
    hidden[:, targets] = rng.random((values.shape[0], len(targets))) < holdout_rate
    if not hidden.any():
        raise ConfigError("holdout mask hid no entries; raise the holdout rate")
    observed &= ~hidden

    raw_columns = [c.model_copy(update={"offset": None, "scale": None}) for c in table.columns]
    tuning = calibrate(
        DataTable(columns=raw_columns, values=np.where(observed, values, np.nan), observed=observed),
        c_multiplier,
    )

    offsets = np.array([c.offset[-1] for c in tuning.columns])
    offset_mse = float(np.mean((np.broadcast_to(offsets, values.shape)[hidden] - values[hidden]) ** 2))

    errors: dict[float, float] = {}
    with logfire.span("select gamma", grid=grid, holdout_rate=holdout_rate, offset_mse=offset_mse):
        for gamma in grid:
            errors[gamma] = _holdout_error(tuning, config.with_gamma(gamma), values, hidden)
            if not errors[gamma] <= offset_mse:
                logfire.warning(
                    "Discarding degenerate gamma candidate",
                    gamma=gamma,
                    mse=errors[gamma],
                    offset_mse=offset_mse,
                )
                errors[gamma] = math.inf
            logfire.info("Gamma candidate", gamma=gamma, mse=errors[gamma])
    return errors


def _holdout_error(
    tuning: DataTable, config: FitConfig, values: np.ndarray, hidden: np.ndarray
) -> float:
    try:
        fact, _ = fit(tuning, config)
    except NumericFailure as exc:
        logfire.warning("Hold-out fit failed", gamma=config.gamma_x, detail=exc.detail)
        return math.inf
    imputed = reconstruct_table(tuning, fact, impute=True)
    with np.errstate(over="ignore", invalid="ignore"):
        mse = float(np.mean((imputed[hidden] - values[hidden]) ** 2))
    return mse if np.isfinite(mse) else math.inf


def select_gamma(
    table: DataTable,
    config: FitConfig,
    grid: list[float] | None = None,
    holdout_rate: float | None = None,
    seed: int | None = None,
    c_multiplier: dict[str, float] | None = None,
) -> float:
    """The grid value with the smallest held-out MSE; ties go to the larger gamma.

    When every candidate is degenerate the largest gamma is returned.
    """
    errors = gamma_holdout_errors(table, config, grid, holdout_rate, seed, c_multiplier)
    best = min(errors.values())
    if math.isinf(best):
        logfire.warning("Every gamma candidate was degenerate", grid=sorted(errors))
    return max(g for g, mse in errors.items() if mse == best)
