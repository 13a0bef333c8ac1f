from importlib.metadata import version

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


def _get_version() -> str:
    try:
        return version("hurdle-glrm")
    except Exception:
        return "0.0.0-dev"


class Settings(BaseSettings):
    """Library and CLI settings."""

    model_config = SettingsConfigDict(
        env_file=".env", env_prefix="HURDLE_GLRM_", case_sensitive=False
    )

    # Logfire
    logfire_token: str = ""
    logfire_environment: str = "local"

    # Solver defaults
    default_seed: int = 0
    max_sweeps: int = 500
    rel_tol: float = 1e-6
    damping_budget: int = 20
    curvature_floor: float = 1e-8
    # Largest Newton step norm per row of X or column of Y
    trust_radius: float = 10.0
    restarts: int = 1

    # Scalar numerics
    exp_clamp: float = 700.0
    newton_tol: float = 1e-10
    newton_max_iter: int = 200

    # Regularization selection
    gamma_grid: list[float] = Field(default_factory=lambda: [0.0, 0.1, 1.0, 10.0])
    # None means "match the observed missing rate of the target column"
    holdout_rate: float | None = None

    # Fan-out for experiments and restarts (joblib semantics: -1 = all cores)
    n_jobs: int = 1

    package_version: str = _get_version()


settings = Settings()
