"""Fitted low-rank factorizations."""

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from .table import ColumnSpec


class Factorization(BaseModel):
    """The fitted triple (X, Y, mu) with Z = X @ Y + mu.

    ``column_layout`` maps each table column to its half-open span of
    embedded columns in ``Y``; ``embedded_names`` names every embedded column
    (``"col"`` for one-dimensional embeddings, ``"col:binary"`` and
    ``"col:value"`` for full hurdle columns).
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    X: np.ndarray
    Y: np.ndarray
    mu: np.ndarray
    column_layout: dict[str, tuple[int, int]]
    embedded_names: list[str]

    @field_validator("X", "Y", "mu", mode="before")
    @classmethod
    def as_float_array(cls, v) -> np.ndarray:
        return np.array(v, dtype=float)

    @model_validator(mode="after")
    def check_dimensions(self) -> "Factorization":
        if self.X.ndim != 2 or self.Y.ndim != 2 or self.mu.ndim != 1:
            raise ValueError("X and Y must be matrices and mu a vector")
        if self.X.shape[1] != self.Y.shape[0]:
            raise ValueError(
                f"X is {self.X.shape} but Y is {self.Y.shape}: inner ranks differ"
            )
        if self.Y.shape[1] != self.mu.shape[0]:
            raise ValueError(f"Y has {self.Y.shape[1]} columns but mu has {self.mu.shape[0]}")
        if len(self.embedded_names) != self.d:
            raise ValueError("embedded_names must name every embedded column")
        spans = sorted(self.column_layout.values())
        if spans and (spans[0][0] != 0 or spans[-1][1] != self.d):
            raise ValueError("column_layout must cover every embedded column")
        for arr in (self.X, self.Y, self.mu):
            if not np.all(np.isfinite(arr)):
                raise ValueError("factorization entries must be finite")
        return self

    @property
    def k(self) -> int:
        return self.X.shape[1]

    @property
    def d(self) -> int:
        return self.Y.shape[1]

    def span(self, column: str) -> slice:
        start, stop = self.column_layout[column]
        return slice(start, stop)

    def embedded_index(self, name: str) -> int:
        try:
            return self.embedded_names.index(name)
        except ValueError:
            raise KeyError(f"Unknown embedded column '{name}'")

    def scores(self) -> np.ndarray:
        """Linear scores Z = X @ Y + mu, one column per embedded dimension."""
        return self.X @ self.Y + self.mu


def embedded_layout(columns: list[ColumnSpec]) -> tuple[dict[str, tuple[int, int]], list[str]]:
    """Assign each column its span of embedded columns, in table order."""
    layout: dict[str, tuple[int, int]] = {}
    names: list[str] = []
    start = 0
    for column in columns:
        stop = start + column.embed_dim
        layout[column.name] = (start, stop)
        if column.embed_dim == 2:
            names.extend([f"{column.name}:binary", f"{column.name}:value"])
        else:
            names.append(column.name)
        start = stop
    return layout, names


class FactorizationManifest(BaseModel):
    """Layout record written next to X.csv / Y.csv / mu.csv."""

    k: int
    n_rows: int
    embedded_names: list[str]
    column_layout: dict[str, tuple[int, int]]
    columns: list[ColumnSpec]
