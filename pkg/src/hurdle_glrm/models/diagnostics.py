"""Diagnostic records."""

import math

from pydantic import BaseModel, ConfigDict, Field, model_validator


class AssociationRow(BaseModel):
    """Angle score and folded distance between the nu column and one other column.

    Both are None when either vector has zero norm (undefined association).
    """

    model_config = ConfigDict(frozen=True)

    column: str
    theta: float | None = Field(default=None, ge=0, le=1)
    distance: float | None = Field(default=None, ge=0, le=1)

    @model_validator(mode="after")
    def check_distance(self) -> "AssociationRow":
        if (self.theta is None) != (self.distance is None):
            raise ValueError("theta and distance must both be set or both be None")
        if self.theta is not None and not math.isclose(
            self.distance, 1.0 - 2.0 * abs(self.theta - 0.5), abs_tol=1e-12
        ):
            raise ValueError("distance must equal 1 - 2|theta - 0.5|")
        return self

    @classmethod
    def from_theta(cls, column: str, theta: float | None) -> "AssociationRow":
        if theta is None:
            return cls(column=column)
        return cls(column=column, theta=theta, distance=1.0 - 2.0 * abs(theta - 0.5))
