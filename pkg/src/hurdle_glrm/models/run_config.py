"""Schema documents and command-line run configuration."""

from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from hurdle_glrm.config.constants import MissingToken

from .hurdle import HurdleMode, HurdleSpec
from .loss import LossKind, LossSpec, ValueDomain
from .table import ColumnSpec


class ColumnSchema(BaseModel):
    """One column block of a schema document.

    A column is a hurdle column exactly when ``nu`` is given; ``loss`` then
    names the g-loss and the binary loss is logistic.
    """

    model_config = ConfigDict(extra="forbid")

    name: str
    loss: LossKind
    domain: ValueDomain | None = None
    nu: float | MissingToken | None = None
    mode: HurdleMode = HurdleMode.FULL
    c_multiplier: float | None = Field(default=None, gt=0)

    @model_validator(mode="after")
    def check_hurdle_fields(self) -> "ColumnSchema":
        if self.nu is None and self.c_multiplier is not None:
            raise ValueError(f"column '{self.name}': c_multiplier needs a nu value")
        return self

    def to_column_spec(self) -> ColumnSpec:
        value_loss = LossSpec(kind=self.loss, domain=self.domain)
        if self.nu is None:
            return ColumnSpec(name=self.name, loss=value_loss)
        return ColumnSpec(
            name=self.name,
            loss=HurdleSpec(nu=self.nu, g_loss=value_loss, mode=self.mode),
            c_multiplier=self.c_multiplier,
        )


class TableSchema(BaseModel):
    """Schema document: exactly one block per CSV column."""

    model_config = ConfigDict(extra="forbid")

    columns: list[ColumnSchema] = Field(min_length=1)

    @model_validator(mode="after")
    def check_unique_names(self) -> "TableSchema":
        names = [c.name for c in self.columns]
        duplicated = sorted({n for n in names if names.count(n) > 1})
        if duplicated:
            raise ValueError(f"columns declared more than once: {duplicated}")
        return self

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.columns]

    def column_specs(self) -> list[ColumnSpec]:
        return [c.to_column_spec() for c in self.columns]

    def c_multipliers(self) -> dict[str, float]:
        return {c.name: c.c_multiplier for c in self.columns if c.c_multiplier is not None}


Subcommand = Literal["fit", "impute", "simulate", "experiment"]


class RunConfig(BaseModel):
    """Resolved configuration of one CLI invocation.

    Its JSON form (paths as strings, sorted keys) is hashed into the output
    manifest, so identical invocations share a config hash.
    """

    command: Subcommand
    out: Path
    input: Path | None = None
    schema_path: Path | None = None
    rank: int | None = Field(default=None, ge=1)
    gamma: float | None = Field(default=None, ge=0)
    gamma_grid: list[float] | None = None
    seed: int = 0
    seeds: int = Field(default=1, ge=1)
    experiment: str | None = None
    generator: Literal["mar", "zero_inflated"] | None = None
    missing_rate: float | None = None
    zero_rates: list[float] | None = None
    max_sweeps: int | None = Field(default=None, ge=1)

    @model_validator(mode="after")
    def check_gamma_choice(self) -> "RunConfig":
        if self.gamma is not None and self.gamma_grid is not None:
            raise ValueError("give either --gamma or --gamma-grid, not both")
        if self.gamma_grid is not None and not self.gamma_grid:
            raise ValueError("--gamma-grid must list at least one value")
        if self.gamma_grid is not None and any(g < 0 for g in self.gamma_grid):
            raise ValueError("--gamma-grid values must be nonnegative")
        return self


class OutputManifest(BaseModel):
    """Index of every file a subcommand wrote under ``--out``."""

    command: Subcommand
    config_hash: str
    package_version: str
    files: list[str]
