"""Seeded synthetic data generators.

Every generator draws from ``numpy.random.Generator(PCG64(seed))`` in a
fixed order, so a seed fully determines its output on every platform.
"""

import logfire
import numpy as np
from scipy.optimize import brentq
from scipy.special import expit
from scipy.stats import poisson

from hurdle_glrm.config.constants import (
    GENERATOR_NAME,
    MAR_N_COLUMNS,
    MAR_N_ROWS,
    MAR_NOISE_RANGE,
    MAR_TRUE_RANK,
    MCAR_RATE,
    ZERO_INFLATED_MEAN_SCALE,
    ZERO_INFLATED_N_COLUMNS,
    ZERO_INFLATED_N_ROWS,
    ZERO_INFLATED_TRUE_RANK,
)
from hurdle_glrm.errors import ConfigError, NumericFailure
from hurdle_glrm.models.simulation import MarDatasetBundle, ZeroInflatedBundle

# Truncated-Poisson rates are kept inside this range when drawing counts
_RATE_BOUNDS = (1e-2, 1e6)


def generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def selection_rate(alpha: float, shifts: np.ndarray) -> float:
    """Mean of 1 / (1 + exp(alpha + s_i))."""
    return float(np.mean(expit(-(alpha + shifts))))


def calibrate_alpha(a2_plus_a3, target_rate: float) -> float:
    """alpha whose mean selection probability over ``a2_plus_a3`` equals ``target_rate``."""
    if not 0 < target_rate < 1:
        raise ConfigError(f"target rate must lie in (0, 1), got {target_rate}")
    shifts = np.asarray(a2_plus_a3, dtype=float).ravel()
    if shifts.size == 0 or not np.all(np.isfinite(shifts)):
        raise ConfigError("alpha calibration needs finite shift values")

    margin = abs(np.log(target_rate / (1.0 - target_rate))) + 40.0
    lo = -float(shifts.max()) - margin
    hi = -float(shifts.min()) + margin

    def excess(alpha: float) -> float:
        return selection_rate(alpha, shifts) - target_rate

    if excess(lo) < 0 or excess(hi) > 0:
        raise NumericFailure(f"alpha not bracketed on [{lo:g}, {hi:g}]")
    return float(brentq(excess, lo, hi, xtol=1e-12, rtol=1e-12))


def systematic_mask(probabilities: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Select each unit with its own probability using one uniform offset.

    The number selected is within one of ``probabilities.sum()``.
    """
    offset = rng.random()
    cumulative = np.concatenate([[0.0], np.cumsum(probabilities)]) + offset
    return np.floor(cumulative[1:]) > np.floor(cumulative[:-1])


def simulate_mar_dataset(
    seed: int,
    n: int = MAR_N_ROWS,
    p: int = MAR_N_COLUMNS,
    k_true: int = MAR_TRUE_RANK,
    mcar_rate: float = MCAR_RATE,
) -> MarDatasetBundle:
    """Low-rank Gaussian table with MCAR and MAR masks on column 1.

    a_i = W z_i + mu + e_i with z_i ~ N(0, I_k), W standard normal,
    mu = (1, ..., p) and e_i ~ N(0, diag(sigma^2)), sigma^2_j ~ U(0.9, 1.1).
    Column 1 is MCAR-missing with probability ``mcar_rate`` (1/(1 + e^1.7)
    unless overridden); the MAR mask
    uses 1/(1 + exp(alpha + a_i2 + a_i3)) with alpha set so its expected
    count matches the realised MCAR count.
    """
    if p < 3:
        raise ConfigError(f"the MAR scheme needs at least 3 columns, got p={p}")
    if n < 2 or k_true < 1:
        raise ConfigError(f"invalid dataset size n={n}, k_true={k_true}")
    if not 0 < mcar_rate < 1:
        raise ConfigError(f"missing rate must lie in (0, 1), got {mcar_rate}")

    rng = generator(seed)
    W = rng.standard_normal((p, k_true))
    sigma2 = rng.uniform(*MAR_NOISE_RANGE, size=p)
    Z = rng.standard_normal((n, k_true))
    E = rng.standard_normal((n, p)) * np.sqrt(sigma2)
    mu = np.arange(1, p + 1, dtype=float)
    complete = Z @ W.T + mu + E

    mcar_mask = rng.random(n) < mcar_rate
    realised = float(mcar_mask.mean())
    if not 0 < realised < 1:
        raise ConfigError(f"MCAR draw produced a degenerate missing rate {realised}")
    shifts = complete[:, 1] + complete[:, 2]
    alpha = calibrate_alpha(shifts, realised)
    mar_mask = systematic_mask(expit(-(alpha + shifts)), rng)

    logfire.info(
        "Simulated MAR dataset",
        seed=seed,
        alpha=alpha,
        mcar_missing=int(mcar_mask.sum()),
        mar_missing=int(mar_mask.sum()),
    )
    return MarDatasetBundle(
        complete=complete,
        truth_W=W,
        truth_mu=mu,
        truth_sigma=sigma2,
        mcar_mask=mcar_mask,
        mar_mask=mar_mask,
        alpha=alpha,
        seed=seed,
        generator=GENERATOR_NAME,
    )


def default_zero_rates(p: int) -> list[float]:
    """Column zero rates spread from 5% to 99%."""
    return [float(r) for r in np.linspace(0.05, 0.99, p)]


def truncated_poisson_draw(rate: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One draw per entry from the Poisson law conditioned on being positive."""
    rate = np.clip(rate, *_RATE_BOUNDS)
    u = rng.uniform(low=poisson.pmf(0, rate), high=1.0)
    return np.maximum(poisson.ppf(u, rate), 1.0)


def simulate_zero_inflated(
    seed: int,
    n: int = ZERO_INFLATED_N_ROWS,
    p: int = ZERO_INFLATED_N_COLUMNS,
    k_true: int = ZERO_INFLATED_TRUE_RANK,
    zero_rates: list[float] | None = None,
    mean_scale: float = ZERO_INFLATED_MEAN_SCALE,
) -> ZeroInflatedBundle:
    """Zero-inflated count table driven by shared low-rank row factors.

    Each entry passes a Bernoulli gate (zero with a probability whose column
    mean is calibrated to ``zero_rates[j]``) and, when not gated to zero, is a
    1-truncated Poisson count with log-rate log(mean_scale) + u_i . w_j. A
    zero rate of 0 disables the gate for that column.
    """
    zero_rates = default_zero_rates(p) if zero_rates is None else list(zero_rates)
    if len(zero_rates) != p:
        raise ConfigError(f"{len(zero_rates)} zero rates for {p} columns")
    bad = [r for r in zero_rates if not 0 <= r < 1]
    if bad:
        raise ConfigError(f"zero rates must lie in [0, 1), got {bad}")
    if not mean_scale > 0:
        raise ConfigError(f"mean_scale must be positive, got {mean_scale}")

    rng = generator(seed)
    U = rng.standard_normal((n, k_true))
    gate_loadings = rng.standard_normal((k_true, p)) / np.sqrt(k_true)
    count_loadings = rng.standard_normal((k_true, p)) / np.sqrt(k_true)
    gate_scores = U @ gate_loadings
    log_rate = np.log(mean_scale) + U @ count_loadings

    zero = np.zeros((n, p), dtype=bool)
    gate_draws = rng.random((n, p))
    for j, rate in enumerate(zero_rates):
        if rate == 0:
            continue
        alpha = calibrate_alpha(gate_scores[:, j], rate)
        zero[:, j] = gate_draws[:, j] < expit(-(alpha + gate_scores[:, j]))

    counts = truncated_poisson_draw(np.exp(log_rate), rng)
    counts[zero] = 0.0

    logfire.info("Simulated zero-inflated table", seed=seed, n=n, p=p)
    return ZeroInflatedBundle(
        counts=counts, zero_rates=zero_rates, seed=seed, generator=GENERATOR_NAME
    )
