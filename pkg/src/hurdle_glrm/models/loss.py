"""Scalar loss descriptors.

A ``LossSpec`` names one convex loss family together with the value domain
its targets live in. The evaluation formulas live in
``hurdle_glrm.services.loss_catalog``.
"""

from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator


class LossKind(str, Enum):
    """Supported scalar loss families."""

    QUADRATIC = "quadratic"
    LOGISTIC = "logistic"
    POISSON = "poisson"
    TRUNCATED_POISSON = "truncated_poisson"


class ValueDomain(str, Enum):
    """Value domains a column (or loss target) may live in."""

    REAL = "real"
    COUNT = "count"
    BINARY = "binary"

    def contains(self, values) -> np.ndarray:
        """Element-wise membership test; NaN is never a member."""
        values = np.asarray(values, dtype=float)
        finite = np.isfinite(values)
        if self is ValueDomain.REAL:
            return finite
        if self is ValueDomain.COUNT:
            return finite & (values >= 0) & (values == np.floor(values))
        return finite & ((values == 1.0) | (values == -1.0))


DEFAULT_DOMAIN: dict[LossKind, ValueDomain] = {
    LossKind.QUADRATIC: ValueDomain.REAL,
    LossKind.LOGISTIC: ValueDomain.BINARY,
    LossKind.POISSON: ValueDomain.COUNT,
    LossKind.TRUNCATED_POISSON: ValueDomain.COUNT,
}

# Quadratic loss is accepted on any numeric domain (PCA on counts).
_ALLOWED_DOMAINS: dict[LossKind, tuple[ValueDomain, ...]] = {
    LossKind.QUADRATIC: (ValueDomain.REAL, ValueDomain.COUNT, ValueDomain.BINARY),
    LossKind.LOGISTIC: (ValueDomain.BINARY,),
    LossKind.POISSON: (ValueDomain.COUNT,),
    LossKind.TRUNCATED_POISSON: (ValueDomain.COUNT,),
}


class LossSpec(BaseModel):
    """One scalar loss family and the domain of its targets."""

    model_config = ConfigDict(frozen=True)

    kind: LossKind
    domain: ValueDomain = ValueDomain.REAL

    @model_validator(mode="before")
    @classmethod
    def fill_default_domain(cls, data):
        if isinstance(data, dict) and data.get("domain") is None and "kind" in data:
            data = {**data, "domain": DEFAULT_DOMAIN[LossKind(data["kind"])]}
        return data

    @model_validator(mode="after")
    def check_domain(self) -> "LossSpec":
        if self.domain not in _ALLOWED_DOMAINS[self.kind]:
            raise ValueError(
                f"{self.kind.value} loss does not accept {self.domain.value} targets. "
                f"Allowed: {[d.value for d in _ALLOWED_DOMAINS[self.kind]]}"
            )
        return self

    @property
    def min_target(self) -> float | None:
        """Smallest admissible target for count losses, None otherwise."""
        if self.kind is LossKind.POISSON:
            return 0.0
        if self.kind is LossKind.TRUNCATED_POISSON:
            return 1.0
        return None

    def admits(self, values) -> np.ndarray:
        """Element-wise check that ``values`` are valid targets for this loss."""
        ok = self.domain.contains(values)
        if self.kind is LossKind.TRUNCATED_POISSON:
            ok &= np.asarray(values, dtype=float) >= 1.0
        return ok


def quadratic() -> LossSpec:
    return LossSpec(kind=LossKind.QUADRATIC)


def logistic() -> LossSpec:
    return LossSpec(kind=LossKind.LOGISTIC)


def poisson() -> LossSpec:
    return LossSpec(kind=LossKind.POISSON)


def truncated_poisson() -> LossSpec:
    return LossSpec(kind=LossKind.TRUNCATED_POISSON)
