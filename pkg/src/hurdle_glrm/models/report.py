"""Metric records emitted by fits and experiments."""

from pydantic import BaseModel


class ColumnSummary(BaseModel):
    """Calibration summary for one column."""

    name: str
    loss: str
    embed_dim: int
    offset: list[float]
    scale: float | None = None
    lambda1: float | None = None
    lambda2: float | None = None


class FitReport(BaseModel):
    """Metrics record written by the fit and impute commands."""

    k: int
    gamma_x: float
    gamma_y: float
    seed: int
    objective_trace: list[float]
    loss_explained: float
    total_loss: float
    columns: list[ColumnSummary]


class MethodSummary(BaseModel):
    """One row of the missing-data imputation table."""

    case: str
    method: str
    average_imputation_mse: float
    average_offset_mse: float
    n_seeds: int
