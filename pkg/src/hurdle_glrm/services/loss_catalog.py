"""Scalar losses: evaluation, derivatives, offsets, scales and argmin.

Every function is vectorized over ``z`` and ``a``. The ``evaluate`` and
``derivatives`` pair skip input validation and are what the solver calls in
its inner loops; the ``loss_*`` functions validate their inputs first.
"""

from functools import lru_cache

import logfire
import numpy as np
from scipy.special import expit, exprel, xlogy

from hurdle_glrm.config.settings import settings
from hurdle_glrm.errors import DegenerateColumnError, DomainError
from hurdle_glrm.models.loss import LossKind, LossSpec
from hurdle_glrm.utils.numeric import safeguarded_newton

# Below this rate the truncated-Poisson curvature switches to its Taylor form
_SMALL_RATE = 1e-3
_NORMALIZER_FLOOR = 1e-8


def _clamped(z: np.ndarray) -> np.ndarray:
    limit = settings.exp_clamp
    over = z > limit
    if np.any(over):
        logfire.warning(
            "Exponent clamped",
            clamp=limit,
            count=int(np.count_nonzero(over)),
            max_z=float(np.max(z)),
        )
        return np.minimum(z, limit)
    return z


# ---------------------------------------------------------------------------
# Zero-truncated Poisson pieces
# ---------------------------------------------------------------------------


def _log_expm1_of_exp(z: np.ndarray) -> np.ndarray:
    """log(exp(exp(z)) - 1), stable for every z."""
    shape = np.shape(z)
    z = np.atleast_1d(z)
    rate = np.exp(z)
    small = rate <= 1.0
    out = np.empty_like(rate)
    out[small] = z[small] + np.log(exprel(rate[small]))
    big = ~small
    out[big] = rate[big] + np.log1p(-np.exp(-rate[big]))
    return out.reshape(shape)


def _truncated_mean(rate: np.ndarray) -> np.ndarray:
    """Mean of the 1-truncated Poisson law: rate / (1 - exp(-rate))."""
    return 1.0 / exprel(-rate)


def _truncated_mean_slope(rate: np.ndarray) -> np.ndarray:
    """Derivative of the truncated mean with respect to the rate."""
    shape = np.shape(rate)
    rate = np.atleast_1d(rate)
    tail = np.empty_like(rate)
    small = rate < _SMALL_RATE
    r = rate[small]
    tail[small] = 0.5 - r / 3.0 + r * r / 8.0
    r = rate[~small]
    tail[~small] = (-np.expm1(-r) - r * np.exp(-r)) / (r * r)
    return (tail / exprel(-rate) ** 2).reshape(shape)


def _normalizer_residual(a: float):
    def residual(c: float) -> tuple[float, float]:
        rate = np.array([c])
        return (
            float(_truncated_mean(rate)[0]) - a,
            float(_truncated_mean_slope(rate)[0]),
        )

    return residual


@lru_cache(maxsize=8192)
def _normalizer(a: float) -> float:
    residual = _normalizer_residual(a)
    lo, hi = _NORMALIZER_FLOOR, a + 10.0
    # The truncated mean exceeds 1 for every positive rate, so a = 1 has no
    # interior root; the floor stands in for the limit c -> 0.
    if residual(lo)[0] >= 0:
        return lo
    return safeguarded_newton(residual, lo, hi, x0=max(a - 1.0, 2 * lo))


def loss_tp_normalizer(a: float) -> float:
    """g(a): the rate whose 1-truncated Poisson mean equals ``a``."""
    if not np.isfinite(a) or a < 1 or a != np.floor(a):
        raise DomainError(f"truncated Poisson targets must be integers >= 1, got {a!r}")
    return _normalizer(float(a))


def _normalizers(a: np.ndarray) -> np.ndarray:
    unique, inverse = np.unique(a, return_inverse=True)
    table = np.array([_normalizer(float(v)) for v in unique])
    return table[inverse].reshape(a.shape)


def _truncated_constant(a: np.ndarray) -> np.ndarray:
    """a*log(g(a)) - log(exp(g(a)) - 1), written to stay finite at a = 1."""
    c = _normalizers(a)
    return (a - 1.0) * np.log(c) - np.log(exprel(c))


# ---------------------------------------------------------------------------
# Unchecked evaluation
# ---------------------------------------------------------------------------


def evaluate(kind: LossKind, z, a) -> np.ndarray:
    """Loss values without domain checks."""
    z, a = np.broadcast_arrays(np.asarray(z, dtype=float), np.asarray(a, dtype=float))
    if kind is LossKind.QUADRATIC:
        return (z - a) ** 2
    if kind is LossKind.LOGISTIC:
        margin = a * z
        return np.log1p(np.exp(-np.abs(margin))) + np.maximum(0.0, -margin)
    if kind is LossKind.POISSON:
        z = _clamped(z)
        return np.exp(z) - a * z + xlogy(a, a) - a
    z = _clamped(z)
    value = _log_expm1_of_exp(z) - a * z + _truncated_constant(a)
    return np.maximum(value, 0.0)


def derivatives(kind: LossKind, z, a) -> tuple[np.ndarray, np.ndarray]:
    """(dL/dz, d2L/dz2) without domain checks."""
    z, a = np.broadcast_arrays(np.asarray(z, dtype=float), np.asarray(a, dtype=float))
    if kind is LossKind.QUADRATIC:
        return 2.0 * (z - a), np.full(z.shape, 2.0)
    if kind is LossKind.LOGISTIC:
        margin = a * z
        return -a * expit(-margin), expit(margin) * expit(-margin)
    rate = np.exp(_clamped(z))
    if kind is LossKind.POISSON:
        return rate - a, rate
    return _truncated_mean(rate) - a, rate * _truncated_mean_slope(rate)


# ---------------------------------------------------------------------------
# Validated public operations
# ---------------------------------------------------------------------------


def _check_inputs(spec: LossSpec, z, a) -> tuple[np.ndarray, np.ndarray]:
    z = np.asarray(z, dtype=float)
    a = np.asarray(a, dtype=float)
    if not np.all(np.isfinite(z)):
        raise DomainError("linear score z must be finite")
    bad = ~spec.admits(a)
    if np.any(bad):
        raise DomainError(
            f"target {np.atleast_1d(a)[np.atleast_1d(bad)][0]!r} is outside the "
            f"{spec.kind.value} domain"
        )
    return z, a


def _unwrap(values: np.ndarray):
    return float(values) if np.ndim(values) == 0 else values


def loss_eval(spec: LossSpec, z, a):
    """Loss L(z, a); a float for scalar inputs, an array otherwise."""
    z, a = _check_inputs(spec, z, a)
    return _unwrap(evaluate(spec.kind, z, a))


def loss_deriv(spec: LossSpec, z, a):
    """(gradient, curvature) of L with respect to z."""
    z, a = _check_inputs(spec, z, a)
    grad, curv = derivatives(spec.kind, z, a)
    return _unwrap(grad), _unwrap(curv)


def loss_offset(spec: LossSpec, values, column: str | None = None) -> float:
    """The constant score minimizing the summed loss over ``values``."""
    values = np.asarray(values, dtype=float).ravel()
    if values.size == 0:
        raise DegenerateColumnError("no values to compute an offset from", column)
    _check_inputs(spec, 0.0, values)

    if spec.kind is LossKind.QUADRATIC:
        return float(values.mean())
    if spec.kind is LossKind.LOGISTIC:
        n_pos = int(np.count_nonzero(values > 0))
        n_neg = values.size - n_pos
        if n_pos == 0 or n_neg == 0:
            raise DegenerateColumnError(
                f"logistic offset diverges ({n_pos} positive, {n_neg} negative targets)",
                column,
            )
        return float(np.log(n_pos / n_neg))

    mean = float(values.mean())
    if spec.kind is LossKind.POISSON:
        if mean == 0:
            raise DegenerateColumnError("Poisson offset diverges on an all-zero column", column)
        return float(np.log(mean))

    if mean <= 1.0:
        raise DegenerateColumnError(
            "truncated Poisson offset diverges when every value is 1", column
        )

    def residual(mu: float) -> tuple[float, float]:
        grad, curv = derivatives(LossKind.TRUNCATED_POISSON, mu, mean)
        return float(grad), float(curv)

    return safeguarded_newton(
        residual, np.log(_NORMALIZER_FLOOR), np.log(mean + 10.0), x0=np.log(mean)
    )


def loss_scale(spec: LossSpec, offset: float, values, column: str | None = None) -> float:
    """sigma^2 such that the offset-only loss of ``values`` divided by it is n - 1."""
    values = np.asarray(values, dtype=float).ravel()
    if values.size < 2:
        raise DegenerateColumnError(
            f"a scale needs at least 2 values, got {values.size}", column
        )
    _check_inputs(spec, offset, values)
    total = float(np.sum(evaluate(spec.kind, offset, values)))
    sigma2 = total / (values.size - 1)
    if not sigma2 > 1e-12:
        raise DegenerateColumnError("offset-only loss vanishes (constant column)", column)
    return sigma2


def argmin_unchecked(kind: LossKind, z, exclude: float | None = None) -> np.ndarray:
    """Domain element minimizing L(z, .) for every score in ``z``."""
    z = np.asarray(z, dtype=float)
    if kind is LossKind.QUADRATIC:
        return z.copy()
    if kind is LossKind.LOGISTIC:
        # Ties (z = 0) go to the smaller label.
        out = np.where(z > 0, 1.0, -1.0)
        if exclude is not None:
            out = np.full(z.shape, -exclude)
        return out

    rate = np.exp(_clamped(z))
    if kind is LossKind.POISSON:
        centre, smallest = rate, 0.0
    else:
        centre, smallest = _truncated_mean(rate), 1.0
    base = np.floor(centre)
    # The loss is convex in a, so the integer minimizer (with one value
    # removed) is among the four integers around the continuous minimizer.
    candidates = np.stack([base - 1, base, base + 1, base + 2], axis=-1)
    allowed = candidates >= smallest
    if exclude is not None:
        allowed &= candidates != exclude
    safe = np.where(allowed, candidates, smallest if exclude != smallest else smallest + 1)
    losses = evaluate(kind, z[..., None], safe)
    losses = np.where(allowed, losses, np.inf)
    pick = np.argmin(losses, axis=-1)
    return np.take_along_axis(candidates, pick[..., None], axis=-1)[..., 0]


def loss_argmin(spec: LossSpec, z, exclude: float | None = None):
    """Reconstructed value: the domain element with the smallest loss at ``z``."""
    z = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z)):
        raise DomainError("linear score z must be finite")
    return _unwrap(argmin_unchecked(spec.kind, z, exclude))
