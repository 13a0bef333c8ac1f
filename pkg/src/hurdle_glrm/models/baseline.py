import numpy as np
from pydantic import BaseModel, ConfigDict


class BaselineResult(BaseModel):
    """Output of one imputation method on one table.

    ``imputation_mse`` is computed over truly missing positions only and
    ``offset_mse`` over the offset targets; both are None when no truth was
    supplied or nothing was missing. ``reconstruction`` is the model's value
    for every entry, observed or not.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    method: str
    imputed: np.ndarray
    offsets: np.ndarray
    imputation_mse: float | None = None
    offset_mse: float | None = None
    loadings: np.ndarray | None = None
    reconstruction: np.ndarray | None = None
    loss_explained: float | None = None
