"""Tests for the scalar loss catalog."""

import math

import numpy as np
import pytest

from hurdle_glrm.config.settings import settings
from hurdle_glrm.errors import DegenerateColumnError, DomainError
from hurdle_glrm.models.loss import (
    LossKind,
    LossSpec,
    ValueDomain,
    logistic,
    poisson,
    quadratic,
    truncated_poisson,
)
from hurdle_glrm.services.loss_catalog import (
    derivatives,
    evaluate,
    loss_argmin,
    loss_deriv,
    loss_eval,
    loss_offset,
    loss_scale,
    loss_tp_normalizer,
)
from test_fixtures.fixtures_losses import (
    ALL_KINDS,
    CONVEXITY_SLACK,
    FD_STEP,
    FD_TOLERANCE,
    LOG_2,
    NORMALIZATION_TOLERANCE,
    random_scores,
    random_targets,
)

# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


class TestLossEval:
    def test_quadratic(self):
        assert loss_eval(quadratic(), 2.0, 3.0) == 1.0

    def test_logistic_at_zero_score(self):
        assert loss_eval(logistic(), 0.0, 1.0) == pytest.approx(LOG_2, abs=1e-12)

    def test_poisson_at_its_minimum(self):
        assert loss_eval(poisson(), math.log(2.0), 2.0) == pytest.approx(0.0, abs=1e-12)

    def test_poisson_away_from_minimum(self):
        assert loss_eval(poisson(), 0.0, 2.0) == pytest.approx(2 * LOG_2 - 1, abs=1e-12)

    def test_poisson_zero_target_uses_zero_log_zero(self):
        assert loss_eval(poisson(), 0.5, 0.0) == pytest.approx(math.exp(0.5), abs=1e-12)

    def test_vectorized_input_returns_array(self):
        result = loss_eval(quadratic(), np.array([0.0, 1.0]), np.array([1.0, 1.0]))
        np.testing.assert_allclose(result, [1.0, 0.0])

    def test__given_target_outside_domain__then_raises_domain_error(self):
        with pytest.raises(DomainError):
            loss_eval(poisson(), 0.0, -1.0)

    def test__given_logistic_target_of_zero__then_raises_domain_error(self):
        with pytest.raises(DomainError):
            loss_eval(logistic(), 0.0, 0.0)

    def test__given_non_finite_score__then_raises_domain_error(self):
        with pytest.raises(DomainError):
            loss_eval(quadratic(), np.inf, 1.0)

    def test__given_truncated_poisson_zero__then_raises_domain_error(self):
        with pytest.raises(DomainError):
            loss_eval(truncated_poisson(), 0.0, 0.0)

    def test_huge_logistic_margin_stays_finite(self):
        assert loss_eval(logistic(), 1e4, -1.0) == pytest.approx(1e4)
        assert loss_eval(logistic(), 1e4, 1.0) == pytest.approx(0.0, abs=1e-300)

    def test_exponent_is_clamped(self):
        value = loss_eval(poisson(), 5000.0, 1.0)
        assert np.isfinite(value)

    def test_clamped_poisson_score_is_used_in_both_terms(self):
        # Given
        limit = settings.exp_clamp

        # When
        beyond = evaluate(LossKind.POISSON, limit + 100.0, 3.0)
        at_limit = evaluate(LossKind.POISSON, limit, 3.0)

        # Then
        assert beyond == at_limit


class TestLossDeriv:
    def test_quadratic(self):
        assert loss_deriv(quadratic(), 2.0, 3.0) == (-2.0, 2.0)

    def test_logistic(self):
        grad, curv = loss_deriv(logistic(), 0.0, 1.0)
        assert grad == pytest.approx(-0.5)
        assert curv == pytest.approx(0.25)

    def test_poisson(self):
        grad, curv = loss_deriv(poisson(), 0.0, 2.0)
        assert grad == pytest.approx(-1.0)
        assert curv == pytest.approx(1.0)

    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test__given_random_inputs__then_matches_central_differences(self, kind, rng):
        # Given
        z = random_scores(rng, 400)
        a = random_targets(kind, rng, 400)

        # When
        grad, curv = derivatives(kind, z, a)
        fd_grad = (evaluate(kind, z + FD_STEP, a) - evaluate(kind, z - FD_STEP, a)) / (2 * FD_STEP)
        grad_hi, _ = derivatives(kind, z + FD_STEP, a)
        grad_lo, _ = derivatives(kind, z - FD_STEP, a)
        fd_curv = (grad_hi - grad_lo) / (2 * FD_STEP)

        # Then
        assert np.all(np.abs(fd_grad - grad) <= FD_TOLERANCE * np.maximum(1.0, np.abs(grad)))
        assert np.all(np.abs(fd_curv - curv) <= FD_TOLERANCE * np.maximum(1.0, np.abs(curv)))

    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_curvature_is_nonnegative(self, kind, rng):
        z = random_scores(rng, 500, -8.0, 8.0)
        _, curv = derivatives(kind, z, random_targets(kind, rng, 500))
        assert np.all(curv >= 0)

    def test_truncated_poisson_curvature_is_smooth_at_small_rates(self):
        # The series branch takes over below rate 1e-3
        z = np.log(np.array([0.999e-3, 1.001e-3]))
        _, curv = derivatives(LossKind.TRUNCATED_POISSON, z, np.array([1.0, 1.0]))
        assert curv[0] == pytest.approx(curv[1], rel=1e-2)


# ---------------------------------------------------------------------------
# Properties
# ---------------------------------------------------------------------------


class TestLossProperties:
    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_nonnegative_over_many_draws(self, kind, rng):
        n = 250_000
        z = random_scores(rng, n, -10.0, 10.0)
        a = random_targets(kind, rng, n)
        assert evaluate(kind, z, a).min() >= -1e-9

    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_convex_in_score(self, kind, rng):
        # Given
        n = 2000
        z1 = random_scores(rng, n, -6.0, 6.0)
        z2 = random_scores(rng, n, -6.0, 6.0)
        t = rng.random(n)
        a = random_targets(kind, rng, n)

        # When
        mixed = evaluate(kind, t * z1 + (1 - t) * z2, a)
        chord = t * evaluate(kind, z1, a) + (1 - t) * evaluate(kind, z2, a)

        # Then
        assert np.all(mixed <= chord + CONVEXITY_SLACK)

    @pytest.mark.parametrize("spec", [quadratic(), logistic(), poisson(), truncated_poisson()])
    def test_offset_minimizes_column_loss(self, spec, rng):
        for _ in range(20):
            values = random_targets(spec.kind, rng, 50)
            if spec.kind is LossKind.LOGISTIC:
                values[:2] = [-1.0, 1.0]
            if spec.kind is LossKind.TRUNCATED_POISSON:
                values[0] = 3.0
            mu = loss_offset(spec, values)
            at = evaluate(spec.kind, mu, values).sum()
            assert at <= evaluate(spec.kind, mu + 1e-3, values).sum()
            assert at <= evaluate(spec.kind, mu - 1e-3, values).sum()

    @pytest.mark.parametrize("spec", [quadratic(), logistic(), poisson(), truncated_poisson()])
    def test_scaled_offset_loss_is_n_minus_one(self, spec, rng):
        # Given
        values = random_targets(spec.kind, rng, 80)
        if spec.kind is LossKind.LOGISTIC:
            values[:2] = [-1.0, 1.0]
        if spec.kind is LossKind.TRUNCATED_POISSON:
            values[0] = 5.0

        # When
        mu = loss_offset(spec, values)
        sigma2 = loss_scale(spec, mu, values)

        # Then
        total = evaluate(spec.kind, mu, values).sum() / sigma2
        assert total == pytest.approx(79.0, abs=NORMALIZATION_TOLERANCE)

    def test_truncated_gap_vanishes_for_large_counts(self):
        def gap(z, a):
            return evaluate(LossKind.TRUNCATED_POISSON, z, a) - evaluate(LossKind.POISSON, z, a)

        small = abs(float(gap(0.0, 1.0)))
        large = abs(float(gap(math.log(50.0), 50.0)))
        assert large < 1e-6 * small


# ---------------------------------------------------------------------------
# Offsets and scales
# ---------------------------------------------------------------------------


class TestLossOffset:
    def test_logistic_log_odds(self):
        values = np.array([1.0] * 60 + [-1.0] * 40)
        assert loss_offset(logistic(), values) == pytest.approx(math.log(1.5), abs=1e-12)

    def test_quadratic_mean(self):
        assert loss_offset(quadratic(), [1.0, 2.0, 3.0]) == pytest.approx(2.0)

    def test_poisson_log_mean(self):
        assert loss_offset(poisson(), [1.0, 2.0, 3.0]) == pytest.approx(LOG_2)

    def test_truncated_poisson_gradient_vanishes(self):
        values = np.array([1.0, 2.0, 2.0, 5.0, 9.0])
        mu = loss_offset(truncated_poisson(), values)
        grad, _ = derivatives(LossKind.TRUNCATED_POISSON, mu, values)
        assert grad.sum() == pytest.approx(0.0, abs=1e-8)

    def test__given_single_class_logistic__then_degenerate(self):
        with pytest.raises(DegenerateColumnError):
            loss_offset(logistic(), [1.0, 1.0, 1.0])

    def test__given_all_zero_poisson__then_degenerate(self):
        with pytest.raises(DegenerateColumnError):
            loss_offset(poisson(), [0.0, 0.0])

    def test__given_all_ones_truncated__then_degenerate(self):
        with pytest.raises(DegenerateColumnError):
            loss_offset(truncated_poisson(), [1.0, 1.0, 1.0])

    def test__given_no_values__then_degenerate(self):
        with pytest.raises(DegenerateColumnError):
            loss_offset(quadratic(), [])


class TestLossScale:
    def test_sample_variance(self):
        assert loss_scale(quadratic(), 2.0, [1.0, 2.0, 3.0]) == pytest.approx(1.0)

    def test__given_constant_column__then_degenerate(self):
        with pytest.raises(DegenerateColumnError):
            loss_scale(quadratic(), 5.0, [5.0, 5.0, 5.0, 5.0])

    def test_logistic_by_direct_summation(self):
        # Given
        values = np.array([1.0] * 60 + [-1.0] * 40)
        mu = math.log(1.5)

        # When
        sigma2 = loss_scale(logistic(), mu, values)

        # Then
        expected = sum(math.log1p(math.exp(-a * mu)) for a in values) / 99
        assert sigma2 == pytest.approx(expected, rel=1e-12)
        assert evaluate(LossKind.LOGISTIC, mu, values).sum() / sigma2 == pytest.approx(99.0)

    def test__given_one_value__then_degenerate(self):
        with pytest.raises(DegenerateColumnError, match="at least 2"):
            loss_scale(quadratic(), 1.0, [1.0], column="a1")


# ---------------------------------------------------------------------------
# Argmin
# ---------------------------------------------------------------------------


class TestLossArgmin:
    def test_quadratic_identity(self):
        assert loss_argmin(quadratic(), 3.7) == 3.7

    def test_poisson_excluding_zero(self):
        assert loss_argmin(poisson(), math.log(2.4), exclude=0.0) == 2.0

    def test_poisson_small_rate_excluding_zero(self):
        assert loss_argmin(poisson(), -5.0, exclude=0.0) == 1.0

    def test_poisson_small_rate_without_exclusion(self):
        assert loss_argmin(poisson(), -5.0) == 0.0

    def test_logistic_sign(self):
        np.testing.assert_array_equal(
            loss_argmin(logistic(), np.array([-2.0, 0.0, 3.0])), [-1.0, -1.0, 1.0]
        )

    def test_poisson_agrees_with_brute_force(self, rng):
        # Given
        z = rng.uniform(-3.0, 6.0, size=300)
        grid = np.arange(0.0, 1001.0)

        # When
        picked = loss_argmin(poisson(), z)
        brute = grid[np.argmin(evaluate(LossKind.POISSON, z[:, None], grid[None, :]), axis=1)]

        # Then
        np.testing.assert_array_equal(picked, brute)

    def test_truncated_poisson_agrees_with_brute_force(self, rng):
        z = rng.uniform(-3.0, 4.0, size=200)
        grid = np.arange(1.0, 301.0)
        picked = loss_argmin(truncated_poisson(), z)
        brute = grid[
            np.argmin(evaluate(LossKind.TRUNCATED_POISSON, z[:, None], grid[None, :]), axis=1)
        ]
        np.testing.assert_array_equal(picked, brute)

    def test_poisson_with_exclusion_agrees_with_brute_force(self, rng):
        z = rng.uniform(-3.0, 4.0, size=200)
        grid = np.arange(1.0, 1001.0)
        picked = loss_argmin(poisson(), z, exclude=0.0)
        brute = grid[np.argmin(evaluate(LossKind.POISSON, z[:, None], grid[None, :]), axis=1)]
        np.testing.assert_array_equal(picked, brute)


# ---------------------------------------------------------------------------
# Truncated-Poisson normalizer
# ---------------------------------------------------------------------------


class TestTruncatedNormalizer:
    def test_one_goes_to_the_lower_limit(self):
        assert loss_tp_normalizer(1) < 1e-6

    def test_large_count_is_close_to_itself(self):
        assert loss_tp_normalizer(100) == pytest.approx(100.0, rel=1e-6)

    def test__given_zero__then_domain_error(self):
        with pytest.raises(DomainError):
            loss_tp_normalizer(0)

    def test__given_fraction__then_domain_error(self):
        with pytest.raises(DomainError):
            loss_tp_normalizer(2.5)

    @pytest.mark.parametrize("a", [2, 3, 7, 20])
    def test_solves_the_mean_equation(self, a):
        c = loss_tp_normalizer(a)
        assert c / (1 - math.exp(-c)) == pytest.approx(a, rel=1e-9)

    @pytest.mark.parametrize("a", [1, 2, 5, 30])
    def test_loss_is_zero_at_its_minimizer(self, a):
        c = loss_tp_normalizer(a)
        assert float(evaluate(LossKind.TRUNCATED_POISSON, math.log(c), a)) == pytest.approx(
            0.0, abs=1e-9
        )


class TestLossSpec:
    def test_default_domain_follows_kind(self):
        assert poisson().domain is ValueDomain.COUNT
        assert logistic().domain is ValueDomain.BINARY

    def test_quadratic_accepts_counts(self):
        assert LossSpec(kind="quadratic", domain="count").domain is ValueDomain.COUNT

    def test_poisson_rejects_real_domain(self):
        with pytest.raises(ValueError):
            LossSpec(kind="poisson", domain="real")
