"""Simulated data bundles."""

from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

MissingCase = Literal["mcar", "mar"]


class MarDatasetBundle(BaseModel):
    """One simulated low-rank Gaussian table with MCAR and MAR masks on column 1."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    complete: np.ndarray
    truth_W: np.ndarray
    truth_mu: np.ndarray
    truth_sigma: np.ndarray
    mcar_mask: np.ndarray
    mar_mask: np.ndarray
    alpha: float
    seed: int
    generator: str

    @model_validator(mode="after")
    def check_shapes(self) -> "MarDatasetBundle":
        n, p = self.complete.shape
        if self.truth_W.shape[0] != p or self.truth_mu.shape != (p,):
            raise ValueError("truth parameters do not match the table width")
        for mask in (self.mcar_mask, self.mar_mask):
            if mask.shape != (n,) or mask.dtype != bool:
                raise ValueError("missingness masks must be boolean vectors over rows")
        return self

    def masked_values(self, case: MissingCase) -> np.ndarray:
        """The complete table with column 1 blanked (NaN) under ``case``."""
        mask = self.mcar_mask if case == "mcar" else self.mar_mask
        values = self.complete.copy()
        values[mask, 0] = np.nan
        return values

    def mask(self, case: MissingCase) -> np.ndarray:
        return self.mcar_mask if case == "mcar" else self.mar_mask


class ZeroInflatedBundle(BaseModel):
    """A synthetic zero-inflated count table and the rates it was drawn for."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    counts: np.ndarray
    zero_rates: list[float]
    seed: int
    generator: str

    @property
    def realised_zero_rates(self) -> list[float]:
        return [float(r) for r in (self.counts == 0).mean(axis=0)]


class SimulationManifest(BaseModel):
    """Manifest written next to every simulated dataset."""

    kind: Literal["mar", "zero_inflated"]
    seed: int
    generator: str
    numpy_version: str
    package_version: str
    files: list[str]
    alpha: float | None = None
    mcar_missing: int | None = None
    mar_missing: int | None = None
    zero_rates: list[float] | None = None
    realised_zero_rates: list[float] | None = None
