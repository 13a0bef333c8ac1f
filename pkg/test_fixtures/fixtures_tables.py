"""Fixtures for solver, diagnostics and baseline tests."""

import numpy as np

from hurdle_glrm.config.constants import MISSING_TOKEN
from hurdle_glrm.models.fit_config import FitConfig
from hurdle_glrm.models.hurdle import HurdleSpec
from hurdle_glrm.models.loss import poisson, quadratic
from hurdle_glrm.models.table import ColumnSpec, DataTable

# ---------------------------------------------------------------------------
# Constants
# ---------------------------------------------------------------------------

RANK_ONE_VALUES = np.array([[1.0, 2.0], [2.0, 4.0]])

SVD_TOLERANCE = 1e-4
DESCENT_SLACK = 1e-9
GAUGE_TOLERANCE = 1e-8

# Singular values of the designed test matrices
LEADING_SPECTRUM = (12.0, 8.0)
# Five separated directions for rank sweeps up to k = 5
SVD_ORACLE_SPECTRUM = (12.0, 9.0, 6.5, 4.5, 3.0)
NOISE_LEVEL = 0.05


# ---------------------------------------------------------------------------
# Factory functions
# ---------------------------------------------------------------------------


def low_rank_values(
    seed: int = 0,
    n: int = 120,
    p: int = 6,
    spectrum: tuple[float, ...] = LEADING_SPECTRUM,
    noise: float = NOISE_LEVEL,
) -> np.ndarray:
    """Column-shifted matrix whose leading singular values are ``spectrum``."""
    rng = np.random.Generator(np.random.PCG64(seed))
    k = len(spectrum)
    U, _ = np.linalg.qr(rng.standard_normal((n, k)))
    V, _ = np.linalg.qr(rng.standard_normal((p, k)))
    signal = (U * np.asarray(spectrum)) @ V.T * np.sqrt(n)
    shifts = np.arange(1, p + 1, dtype=float)
    return signal + shifts + noise * rng.standard_normal((n, p))


def quadratic_table(values: np.ndarray, observed: np.ndarray | None = None) -> DataTable:
    columns = [ColumnSpec(name=f"a{j + 1}", loss=quadratic()) for j in range(values.shape[1])]
    return DataTable(columns=columns, values=values, observed=observed)


def unscaled_quadratic_table(values: np.ndarray) -> DataTable:
    """Quadratic columns with offset 0 and scale 1 (no centering or scaling)."""
    columns = [
        ColumnSpec(name=f"a{j + 1}", loss=quadratic(), offset=(0.0,), scale=1.0)
        for j in range(values.shape[1])
    ]
    return DataTable(columns=columns, values=values)


def missing_hurdle_table(seed: int = 0, n: int = 300, p: int = 5, missing_rate: float = 0.2):
    """Low-rank Gaussian table; column a1 is a missing-nu hurdle column."""
    values = low_rank_values(seed, n=n, p=p, noise=0.5)
    rng = np.random.Generator(np.random.PCG64(seed + 1))
    hidden = rng.random(n) < missing_rate
    hidden[:2] = True
    hidden[2:4] = False
    masked = values.copy()
    masked[hidden, 0] = np.nan
    columns = [
        ColumnSpec(name="a1", loss=HurdleSpec(nu=MISSING_TOKEN, g_loss=quadratic()))
    ] + [ColumnSpec(name=f"a{j + 1}", loss=quadratic()) for j in range(1, p)]
    return DataTable(columns=columns, values=masked), values, hidden


def count_hurdle_table(seed: int = 0, n: int = 200, p: int = 4) -> DataTable:
    """Zero-inflated counts, every column a zero hurdle with Poisson values."""
    rng = np.random.Generator(np.random.PCG64(seed))
    rates = np.exp(rng.normal(1.0, 0.5, size=(n, p)))
    counts = rng.poisson(rates) + 1.0
    zeros = rng.random((n, p)) < np.linspace(0.2, 0.7, p)
    zeros[:2] = True
    zeros[2:4] = False
    counts[zeros] = 0.0
    columns = [
        ColumnSpec(name=f"a{j + 1}", loss=HurdleSpec(nu=0.0, g_loss=poisson()))
        for j in range(p)
    ]
    return DataTable(columns=columns, values=counts)


def quick_config(k: int, **kwargs) -> FitConfig:
    kwargs.setdefault("max_sweeps", 200)
    return FitConfig(k=k, **kwargs)
