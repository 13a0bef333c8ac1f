from pydantic import BaseModel, ConfigDict, Field

from hurdle_glrm.config.settings import settings


class FitConfig(BaseModel):
    """Controls for one alternating-minimization fit."""

    model_config = ConfigDict(frozen=True)

    k: int = Field(ge=1)
    gamma_x: float = Field(default=0.0, ge=0)
    gamma_y: float = Field(default=0.0, ge=0)
    max_sweeps: int = Field(default_factory=lambda: settings.max_sweeps, ge=1)
    rel_tol: float = Field(default_factory=lambda: settings.rel_tol, gt=0)
    seed: int = Field(default_factory=lambda: settings.default_seed)
    damping: int = Field(default_factory=lambda: settings.damping_budget, ge=0)
    curvature_floor: float = Field(default_factory=lambda: settings.curvature_floor, gt=0)
    trust_radius: float = Field(default_factory=lambda: settings.trust_radius, gt=0)
    restarts: int = Field(default_factory=lambda: settings.restarts, ge=1)
    mar_offset_columns: list[str] = Field(default_factory=list)

    def with_gamma(self, gamma: float) -> "FitConfig":
        """Copy with gamma_x = gamma_y = gamma."""
        return self.model_copy(update={"gamma_x": gamma, "gamma_y": gamma})
