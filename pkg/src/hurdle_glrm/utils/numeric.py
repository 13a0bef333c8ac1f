"""Scalar root finding."""

from collections.abc import Callable

import logfire

from hurdle_glrm.config.settings import settings
from hurdle_glrm.errors import NumericFailure


def safeguarded_newton(
    fun: Callable[[float], tuple[float, float]],
    lo: float,
    hi: float,
    x0: float | None = None,
    tol: float | None = None,
    max_iter: int | None = None,
) -> float:
    """Root of an increasing function on [lo, hi] by Newton with bisection fallback.

    ``fun`` returns ``(value, derivative)``. The bracket must satisfy
    ``fun(lo) <= 0 <= fun(hi)``; it shrinks every iteration, and a Newton step
    that leaves it (or a non-positive derivative) is replaced by bisection.
    """
    tol = settings.newton_tol if tol is None else tol
    max_iter = settings.newton_max_iter if max_iter is None else max_iter

    f_lo, _ = fun(lo)
    f_hi, _ = fun(hi)
    if f_lo > 0 or f_hi < 0:
        raise NumericFailure(
            f"root not bracketed on [{lo:g}, {hi:g}]: f(lo)={f_lo:g}, f(hi)={f_hi:g}"
        )
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi

    x = 0.5 * (lo + hi) if x0 is None or not lo < x0 < hi else x0
    for _ in range(max_iter):
        f, df = fun(x)
        if f == 0:
            return x
        if f < 0:
            lo = x
        else:
            hi = x
        step = f / df if df > 0 else None
        candidate = x - step if step is not None else None
        if candidate is None or not lo < candidate < hi:
            candidate = 0.5 * (lo + hi)
        if abs(candidate - x) <= tol * max(1.0, abs(x)) or hi - lo <= tol:
            return candidate
        x = candidate

    logfire.error("Newton iteration did not converge", lo=lo, hi=hi, x=x)
    raise NumericFailure(f"Newton iteration did not converge in {max_iter} steps")
