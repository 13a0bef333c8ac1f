"""Composite hurdle loss configuration."""

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator

from hurdle_glrm.config.constants import MISSING_TOKEN, MissingToken

from .loss import LossKind, LossSpec, logistic


class HurdleMode(str, Enum):
    """Full mode embeds a column in two dimensions, reduced mode in one."""

    FULL = "full"
    REDUCED = "reduced"


class HurdleSpec(BaseModel):
    """Hurdle loss: binary loss on the nu-indicator plus a gated value loss.

    ``nu`` is either a domain value (e.g. ``0`` for zero-inflated counts) or
    the token ``"missing"``, in which case missingness itself is the nu event.
    """

    model_config = ConfigDict(frozen=True)

    nu: float | MissingToken = 0.0
    binary_loss: LossSpec = Field(default_factory=logistic)
    g_loss: LossSpec
    lambda1: float = Field(default=1.0, gt=0)
    lambda2: float = Field(default=1.0, gt=0)
    mode: HurdleMode = HurdleMode.FULL

    @model_validator(mode="after")
    def check_components(self) -> "HurdleSpec":
        if self.binary_loss.kind is not LossKind.LOGISTIC:
            raise ValueError("hurdle binary_loss must be logistic")
        if self.g_loss.kind is LossKind.LOGISTIC:
            raise ValueError("hurdle g_loss must describe non-binary values")
        return self

    @property
    def nu_is_missing(self) -> bool:
        return self.nu == MISSING_TOKEN

    @property
    def embed_dim(self) -> int:
        return 2 if self.mode is HurdleMode.FULL else 1
