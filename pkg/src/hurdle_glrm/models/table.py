"""Column-typed data tables."""

from typing import Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .hurdle import HurdleSpec
from .loss import LossKind, LossSpec


class ColumnSpec(BaseModel):
    """One column of a data table: its loss and, once calibrated, its offsets.

    ``offset`` has one entry per embedded dimension. ``scale`` is the
    sigma^2 divisor of a plain loss; hurdle columns carry their weights in
    ``loss.lambda1`` / ``loss.lambda2`` and leave ``scale`` at 1.
    """

    model_config = ConfigDict(frozen=True)

    name: str
    loss: Union[HurdleSpec, LossSpec]
    offset: tuple[float, ...] | None = None
    scale: float | None = Field(default=None, gt=0)
    c_multiplier: float | None = Field(default=None, gt=0)

    @model_validator(mode="after")
    def check_offset_length(self) -> "ColumnSpec":
        if self.offset is not None and len(self.offset) != self.embed_dim:
            raise ValueError(
                f"column '{self.name}': offset has {len(self.offset)} entries, "
                f"expected {self.embed_dim}"
            )
        return self

    @property
    def is_hurdle(self) -> bool:
        return isinstance(self.loss, HurdleSpec)

    @property
    def embed_dim(self) -> int:
        return self.loss.embed_dim if self.is_hurdle else 1

    @property
    def is_calibrated(self) -> bool:
        return self.offset is not None and self.scale is not None

    @property
    def value_loss(self) -> LossSpec:
        """The loss applied to the column's values (g-loss for hurdle columns)."""
        return self.loss.g_loss if self.is_hurdle else self.loss

    @property
    def has_quadratic_values(self) -> bool:
        return self.value_loss.kind is LossKind.QUADRATIC


class DataTable(BaseModel):
    """An n x p table with per-column losses and an observed-entry mask.

    ``values`` stores NaN at unobserved entries by convention, but the mask in
    ``observed`` is authoritative: anything stored at an unobserved position
    is ignored by every computation.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    columns: list[ColumnSpec]
    values: np.ndarray
    observed: np.ndarray | None = None

    @field_validator("values", mode="before")
    @classmethod
    def as_float_matrix(cls, v) -> np.ndarray:
        arr = np.array(v, dtype=float)
        if arr.ndim != 2:
            raise ValueError(f"values must be a 2-D matrix, got {arr.ndim} dims")
        return arr

    @model_validator(mode="after")
    def check_shape_and_domains(self) -> "DataTable":
        n, p = self.values.shape
        if p != len(self.columns):
            raise ValueError(f"{p} value columns but {len(self.columns)} column specs")
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate column names in {names}")
        if self.observed is None:
            object.__setattr__(self, "observed", ~np.isnan(self.values))
        else:
            mask = np.asarray(self.observed, dtype=bool)
            if mask.shape != (n, p):
                raise ValueError(f"observed mask has shape {mask.shape}, expected {(n, p)}")
            object.__setattr__(self, "observed", mask)

        for j, column in enumerate(self.columns):
            col = self.values[self.observed[:, j], j]
            if column.is_hurdle and not column.loss.nu_is_missing:
                col = col[col != column.loss.nu]
            bad = ~column.value_loss.admits(col)
            if bad.any():
                raise ValueError(
                    f"column '{column.name}': {int(bad.sum())} observed values outside "
                    f"the {column.value_loss.kind.value} domain (first: {col[bad][0]!r})"
                )
        return self

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.columns]

    @property
    def embedded_dim(self) -> int:
        return sum(c.embed_dim for c in self.columns)

    @property
    def is_calibrated(self) -> bool:
        return all(c.is_calibrated for c in self.columns)

    def column_index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"Unknown column '{name}'. Known columns: {self.names}")

    def column(self, name: str) -> ColumnSpec:
        return self.columns[self.column_index(name)]

    def with_columns(self, columns: list[ColumnSpec]) -> "DataTable":
        return DataTable(columns=columns, values=self.values, observed=self.observed)

    def with_observed(self, observed: np.ndarray) -> "DataTable":
        return DataTable(columns=self.columns, values=self.values, observed=observed)
