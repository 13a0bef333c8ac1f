"""Fixtures for scalar and hurdle loss tests."""

import math

import numpy as np

from hurdle_glrm.models.hurdle import HurdleMode, HurdleSpec
from hurdle_glrm.models.loss import LossKind, LossSpec, poisson, quadratic

# ---------------------------------------------------------------------------
# Constants
# ---------------------------------------------------------------------------

FD_STEP = 1e-5
FD_TOLERANCE = 1e-6
CONVEXITY_SLACK = 1e-9
NORMALIZATION_TOLERANCE = 1e-9

LOG_2 = math.log(2.0)
SIGMOID_1 = 1.0 / (1.0 + math.exp(-1.0))

# Hand-solved weight system: S_b=50, S_g=25, n=100, c=1
WEIGHT_SUMS_EXAMPLE = {"s_b": 50.0, "s_g": 25.0, "n": 100, "c": 1.0}
WEIGHT_SUMS_EXPECTED = (0.99, 1.98)

ALL_KINDS = list(LossKind)


# ---------------------------------------------------------------------------
# Factory functions
# ---------------------------------------------------------------------------


def random_targets(kind: LossKind, rng: np.random.Generator, size: int) -> np.ndarray:
    """Targets valid for ``kind``."""
    if kind is LossKind.QUADRATIC:
        return rng.normal(0.0, 3.0, size=size)
    if kind is LossKind.LOGISTIC:
        return rng.choice([-1.0, 1.0], size=size)
    if kind is LossKind.POISSON:
        return rng.integers(0, 40, size=size).astype(float)
    return rng.integers(1, 40, size=size).astype(float)


def random_scores(rng: np.random.Generator, size: int, low: float = -3.0, high: float = 3.0):
    return rng.uniform(low, high, size=size)


def zero_inflated_column(
    rng: np.random.Generator, n: int, zero_share: float, mean: float = 4.0
) -> np.ndarray:
    """Count column with roughly ``zero_share`` zeros, at least 2 zeros and
    at least 2 distinct positive counts."""
    zeros = rng.random(n) < zero_share
    zeros[:2] = True
    zeros[2:4] = False
    counts = rng.poisson(mean, size=n) + 1.0
    counts[2:4] = (1.0, 2.0)
    return np.where(zeros, 0.0, counts)


def full_hurdle(g_loss: LossSpec | None = None, **kwargs) -> HurdleSpec:
    return HurdleSpec(nu=0.0, g_loss=g_loss or quadratic(), **kwargs)


def reduced_hurdle(g_loss: LossSpec | None = None, **kwargs) -> HurdleSpec:
    return HurdleSpec(nu=0.0, g_loss=g_loss or quadratic(), mode=HurdleMode.REDUCED, **kwargs)


def poisson_hurdle(**kwargs) -> HurdleSpec:
    return HurdleSpec(nu=0.0, g_loss=poisson(), **kwargs)
