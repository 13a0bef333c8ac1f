"""Composite hurdle loss.

A hurdle column is scored by a logistic loss on the indicator a* (+1 when
the entry equals nu, -1 otherwise) plus, for entries that are not nu, a
value loss g on the entry itself. Full mode gives each component its own
embedded column; reduced mode shares one.
"""

import math

import logfire
import numpy as np
from scipy.special import expit

from hurdle_glrm.config.constants import WEIGHT_TOLERANCE
from hurdle_glrm.config.settings import settings
from hurdle_glrm.errors import DegenerateColumnError, DomainError, NumericFailure
from hurdle_glrm.models.hurdle import HurdleMode, HurdleSpec
from hurdle_glrm.models.loss import LossKind, LossSpec, logistic
from hurdle_glrm.utils.numeric import safeguarded_newton

from .loss_catalog import argmin_unchecked, derivatives, evaluate, loss_offset


def encode_indicator(a, nu) -> np.ndarray | float:
    """+1 where ``a`` is nu (or missing, when nu is the missing token), -1 elsewhere."""
    values = np.asarray(a, dtype=float)
    if nu == "missing":
        hit = np.isnan(values)
    else:
        hit = values == float(nu)
    out = np.where(hit, 1.0, -1.0)
    return float(out) if out.ndim == 0 else out


def _filler(spec: HurdleSpec) -> float:
    """A value inside the g-domain used at gated-off entries."""
    return spec.g_loss.min_target or 1.0


def _gate(spec: HurdleSpec, a: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(indicator, non-nu mask, targets safe to feed to the g-loss)."""
    indicator = np.asarray(encode_indicator(a, spec.nu))
    not_nu = indicator < 0
    safe = np.where(not_nu, a, _filler(spec))
    return indicator, not_nu, safe


def _split_scores(spec: HurdleSpec, z) -> tuple[np.ndarray, np.ndarray]:
    z = np.asarray(z, dtype=float)
    if z.ndim == 0 or z.shape[-1] != spec.embed_dim:
        raise DomainError(
            f"{spec.mode.value} hurdle needs embedding vectors of length "
            f"{spec.embed_dim}, got shape {z.shape}"
        )
    if not np.all(np.isfinite(z)):
        raise DomainError("linear score z must be finite")
    return z[..., 0], z[..., -1]


def _check_values(spec: HurdleSpec, a: np.ndarray, not_nu: np.ndarray) -> None:
    bad = not_nu & ~spec.g_loss.admits(a)
    if np.any(bad):
        raise DomainError(
            f"value {np.atleast_1d(a)[np.atleast_1d(bad)][0]!r} is outside the "
            f"{spec.g_loss.kind.value} domain"
        )


def _unwrap(values: np.ndarray):
    return float(values) if np.ndim(values) == 0 else values


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def hurdle_terms(spec: HurdleSpec, z1, z2, a) -> np.ndarray:
    """Unchecked hurdle loss for score arrays z1, z2 (equal in reduced mode)."""
    indicator, not_nu, safe = _gate(spec, np.asarray(a, dtype=float))
    binary = evaluate(LossKind.LOGISTIC, z1, indicator)
    value = np.where(not_nu, evaluate(spec.g_loss.kind, z2, safe), 0.0)
    return spec.lambda1 * binary + spec.lambda2 * value


def hurdle_eval(spec: HurdleSpec, z, a):
    """lambda1 * L_b(z1, a*) + [a != nu] * lambda2 * L_g(z2, a)."""
    z1, z2 = _split_scores(spec, z)
    a = np.asarray(a, dtype=float)
    _, not_nu, _ = _gate(spec, a)
    _check_values(spec, a, not_nu)
    return _unwrap(hurdle_terms(spec, z1, z2, a))


def hurdle_deriv(spec: HurdleSpec, z, a) -> tuple[np.ndarray, np.ndarray]:
    """Gradient and curvature with one entry per embedded coordinate."""
    z1, z2 = _split_scores(spec, z)
    a = np.asarray(a, dtype=float)
    indicator, not_nu, safe = _gate(spec, a)
    _check_values(spec, a, not_nu)

    grad_b, curv_b = derivatives(LossKind.LOGISTIC, z1, indicator)
    grad_g, curv_g = derivatives(spec.g_loss.kind, z2, safe)
    grad_b, curv_b = spec.lambda1 * grad_b, spec.lambda1 * curv_b
    grad_g = np.where(not_nu, spec.lambda2 * grad_g, 0.0)
    curv_g = np.where(not_nu, spec.lambda2 * curv_g, 0.0)

    if spec.mode is HurdleMode.REDUCED:
        return (grad_b + grad_g)[..., None], (curv_b + curv_g)[..., None]
    return np.stack([grad_b, grad_g], axis=-1), np.stack([curv_b, curv_g], axis=-1)


def nu_probability(z1):
    """Estimated Pr[a = nu] from the binary-component score."""
    return _unwrap(expit(np.asarray(z1, dtype=float)))


# ---------------------------------------------------------------------------
# Reconstruction
# ---------------------------------------------------------------------------


def _nu_value(spec: HurdleSpec) -> float:
    return math.nan if spec.nu_is_missing else float(spec.nu)


def value_reconstruct(spec: HurdleSpec, z2) -> np.ndarray:
    """The best non-nu value for g-scores ``z2``, ignoring the binary component."""
    exclude = None if spec.nu_is_missing else float(spec.nu)
    return argmin_unchecked(spec.g_loss.kind, z2, exclude=exclude)


def reconstruct_terms(spec: HurdleSpec, z1, z2) -> np.ndarray:
    """Unchecked reconstruction for score arrays; nu wins only on a strict inequality."""
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    best = value_reconstruct(spec, z2)
    cost_value = spec.lambda1 * evaluate(LossKind.LOGISTIC, z1, -1.0) + spec.lambda2 * evaluate(
        spec.g_loss.kind, z2, best
    )
    cost_nu = spec.lambda1 * evaluate(LossKind.LOGISTIC, z1, 1.0)
    return np.where(cost_value > cost_nu, _nu_value(spec), best)


def hurdle_reconstruct(spec: HurdleSpec, z):
    """nu when it beats the best non-nu value under the hurdle loss, else that value."""
    z1, z2 = _split_scores(spec, z)
    return _unwrap(reconstruct_terms(spec, z1, z2))


# ---------------------------------------------------------------------------
# Weights
# ---------------------------------------------------------------------------


def hurdle_weights_from_sums(s_b: float, s_g: float, n: int, c: float) -> tuple[float, float]:
    """Solve lambda1*S_b + lambda2*S_g = n - 1 and lambda1*S_b = c*lambda2*S_g."""
    if not s_b > 0 or not s_g > 0:
        raise DegenerateColumnError(
            f"hurdle component losses must be positive (S_b={s_b:g}, S_g={s_g:g})"
        )
    if not c > 0:
        raise DomainError(f"c multiplier must be positive, got {c!r}")
    lambda1 = c * (n - 1) / ((c + 1) * s_b)
    lambda2 = (n - 1) / ((c + 1) * s_g)

    if not (
        math.isclose(lambda1 * s_b + lambda2 * s_g, n - 1, rel_tol=WEIGHT_TOLERANCE)
        and math.isclose(lambda1 * s_b, c * lambda2 * s_g, rel_tol=WEIGHT_TOLERANCE)
    ):
        logfire.error("Hurdle weight post-condition failed", s_b=s_b, s_g=s_g, n=n, c=c)
        raise NumericFailure("hurdle weights do not satisfy the weight system")
    return lambda1, lambda2


def _shared_offset(
    indicator: np.ndarray,
    g_values: np.ndarray,
    g_loss: LossSpec,
    lambda1: float,
    lambda2: float,
    bracket: tuple[float, float],
) -> float:
    def residual(mu: float) -> tuple[float, float]:
        gb, cb = derivatives(LossKind.LOGISTIC, mu, indicator)
        gg, cg = derivatives(g_loss.kind, mu, g_values)
        return (
            float(lambda1 * gb.sum() + lambda2 * gg.sum()),
            float(lambda1 * cb.sum() + lambda2 * cg.sum()),
        )

    lo, hi = bracket
    if lo == hi:
        return lo
    return safeguarded_newton(residual, lo, hi)


def solve_hurdle_weights(
    values,
    nu,
    c: float | None = None,
    binary_loss: LossSpec | None = None,
    g_loss: LossSpec | None = None,
    mode: HurdleMode = HurdleMode.FULL,
    column: str | None = None,
) -> tuple[float, float, tuple[float, float]]:
    """Offsets and weights that make the offset-only hurdle loss total n - 1.

    ``values`` holds one entry per row counted in n_j: observed entries for a
    value-nu column, every row (NaN where missing) for a missing-nu column.
    ``c`` defaults to n_nu / (n - n_nu). Returns (lambda1, lambda2, (mu_b, mu_g));
    in reduced mode mu_b == mu_g is the shared offset.
    """
    binary_loss = binary_loss or logistic()
    if binary_loss.kind is not LossKind.LOGISTIC:
        raise DomainError("hurdle binary loss must be logistic")
    if g_loss is None:
        raise DomainError("a hurdle column needs a g-loss")

    values = np.asarray(values, dtype=float).ravel()
    if nu != "missing":
        values = values[~np.isnan(values)]
    indicator = np.asarray(encode_indicator(values, nu)).reshape(-1)
    n = values.size
    n_nu = int(np.count_nonzero(indicator > 0))
    if n_nu < 2 or n - n_nu < 2:
        raise DegenerateColumnError(
            f"hurdle weights need at least 2 nu and 2 non-nu entries "
            f"(got {n_nu} nu of {n})",
            column,
        )
    g_values = values[indicator < 0]
    if np.any(~g_loss.admits(g_values)):
        raise DomainError(f"non-nu values outside the {g_loss.kind.value} domain")
    if c is None:
        c = n_nu / (n - n_nu)

    mu_b = loss_offset(binary_loss, indicator, column=column)
    mu_g = loss_offset(g_loss, g_values, column=column)

    if mode is HurdleMode.FULL:
        s_b = float(evaluate(LossKind.LOGISTIC, mu_b, indicator).sum())
        s_g = float(evaluate(g_loss.kind, mu_g, g_values).sum())
        lambda1, lambda2 = hurdle_weights_from_sums(s_b, s_g, n, c)
        return lambda1, lambda2, (mu_b, mu_g)

    # Reduced mode: the shared offset depends on the weights and vice versa,
    # so iterate to a fixed point.
    bracket = (min(mu_b, mu_g), max(mu_b, mu_g))
    mu = mu_g
    for _ in range(settings.newton_max_iter):
        s_b = float(evaluate(LossKind.LOGISTIC, mu, indicator).sum())
        s_g = float(evaluate(g_loss.kind, mu, g_values).sum())
        lambda1, lambda2 = hurdle_weights_from_sums(s_b, s_g, n, c)
        updated = _shared_offset(indicator, g_values, g_loss, lambda1, lambda2, bracket)
        if abs(updated - mu) <= settings.newton_tol * max(1.0, abs(mu)):
            s_b = float(evaluate(LossKind.LOGISTIC, updated, indicator).sum())
            s_g = float(evaluate(g_loss.kind, updated, g_values).sum())
            lambda1, lambda2 = hurdle_weights_from_sums(s_b, s_g, n, c)
            return lambda1, lambda2, (updated, updated)
        mu = updated

    logfire.error("Reduced hurdle offset did not settle", column=column, mu=mu)
    raise NumericFailure(
        f"reduced hurdle offset did not converge for column '{column}'"
        if column
        else "reduced hurdle offset did not converge"
    )
