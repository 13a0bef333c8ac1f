"""Tests for the seeded synthetic data generators."""

import numpy as np
import pytest

from hurdle_glrm.config.constants import MCAR_RATE
from hurdle_glrm.errors import ConfigError
from hurdle_glrm.services.simgen import (
    calibrate_alpha,
    default_zero_rates,
    generator,
    selection_rate,
    simulate_mar_dataset,
    simulate_zero_inflated,
    systematic_mask,
    truncated_poisson_draw,
)


class TestCalibrateAlpha:
    def test_default_missing_rate(self):
        assert MCAR_RATE == pytest.approx(0.1545, abs=5e-5)

    def test_zero_shifts_recover_the_logit(self):
        assert calibrate_alpha(np.zeros(10), MCAR_RATE) == pytest.approx(1.7, abs=1e-9)

    def test_symmetric_shifts_at_one_half(self):
        assert calibrate_alpha([-1.0, 1.0], 0.5) == pytest.approx(0.0, abs=1e-9)

    def test_matches_target_rate_on_random_shifts(self, rng):
        shifts = rng.normal(3.0, 2.0, size=1000)
        for rate in (0.01, 0.2, 0.7):
            alpha = calibrate_alpha(shifts, rate)
            assert selection_rate(alpha, shifts) == pytest.approx(rate, abs=1e-9)

    @pytest.mark.parametrize("rate", [0.0, 1.0, -0.2, 1.5])
    def test__given_rate_outside_unit_interval__then_config_error(self, rate):
        with pytest.raises(ConfigError):
            calibrate_alpha([0.0, 1.0], rate)


class TestSystematicMask:
    def test_selected_count_within_one_of_expected(self, rng):
        probabilities = rng.random(500) * 0.4
        mask = systematic_mask(probabilities, generator(3))
        assert abs(mask.sum() - probabilities.sum()) < 1.0

    def test_certain_and_impossible_units(self):
        mask = systematic_mask(np.array([1.0, 0.0, 1.0, 0.0]), generator(0))
        np.testing.assert_array_equal(mask, [True, False, True, False])


class TestSimulateMarDataset:
    def test_same_seed_same_bundle(self):
        first = simulate_mar_dataset(seed=4, n=300)
        second = simulate_mar_dataset(seed=4, n=300)
        np.testing.assert_array_equal(first.complete, second.complete)
        np.testing.assert_array_equal(first.mar_mask, second.mar_mask)
        assert first.alpha == second.alpha

    def test_different_seeds_differ(self):
        first = simulate_mar_dataset(seed=4, n=300)
        second = simulate_mar_dataset(seed=5, n=300)
        assert not np.array_equal(first.complete, second.complete)

    def test_shapes_and_truth(self):
        bundle = simulate_mar_dataset(seed=1)
        assert bundle.complete.shape == (5000, 10)
        assert bundle.truth_W.shape == (10, 4)
        np.testing.assert_array_equal(bundle.truth_mu, np.arange(1, 11))
        assert np.all((bundle.truth_sigma >= 0.9) & (bundle.truth_sigma <= 1.1))

    def test_column_means_follow_the_offsets(self):
        bundle = simulate_mar_dataset(seed=2)
        np.testing.assert_allclose(bundle.complete.mean(axis=0), bundle.truth_mu, atol=0.3)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_missing_rates(self, seed):
        # Given
        bundle = simulate_mar_dataset(seed=seed)

        # Then: MCAR near its rate and MAR count matched to MCAR
        assert bundle.mcar_mask.mean() == pytest.approx(MCAR_RATE, abs=0.025)
        assert abs(int(bundle.mar_mask.sum()) - int(bundle.mcar_mask.sum())) <= 1

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_mar_mask_favors_small_shift_values(self, seed):
        bundle = simulate_mar_dataset(seed=seed)
        shifts = bundle.complete[:, 1] + bundle.complete[:, 2]
        assert np.corrcoef(bundle.mar_mask.astype(float), shifts)[0, 1] < -0.1

    def test_masked_values_blank_the_first_column_only(self):
        bundle = simulate_mar_dataset(seed=0, n=200)
        values = bundle.masked_values("mar")
        np.testing.assert_array_equal(np.isnan(values[:, 0]), bundle.mar_mask)
        assert not np.isnan(values[:, 1:]).any()

    def test__given_too_few_columns__then_config_error(self):
        with pytest.raises(ConfigError, match="at least 3 columns"):
            simulate_mar_dataset(seed=0, p=2)

    def test__given_bad_missing_rate__then_config_error(self):
        with pytest.raises(ConfigError):
            simulate_mar_dataset(seed=0, mcar_rate=1.5)


class TestSimulateZeroInflated:
    def test_realised_rates_near_targets(self):
        bundle = simulate_zero_inflated(seed=0)
        np.testing.assert_allclose(
            bundle.realised_zero_rates, default_zero_rates(14), atol=0.045
        )

    def test_extreme_rates(self):
        # Given
        bundle = simulate_zero_inflated(seed=1, n=600, p=2, zero_rates=[0.0, 0.99])

        # Then
        assert bundle.realised_zero_rates[0] == 0.0
        assert bundle.realised_zero_rates[1] >= 0.95

    def test_non_zero_entries_are_positive_counts(self):
        counts = simulate_zero_inflated(seed=2, n=300, p=4).counts
        positive = counts[counts != 0]
        assert np.all(positive >= 1)
        np.testing.assert_array_equal(positive, np.round(positive))

    def test_same_seed_same_counts(self):
        first = simulate_zero_inflated(seed=3, n=200, p=3)
        second = simulate_zero_inflated(seed=3, n=200, p=3)
        np.testing.assert_array_equal(first.counts, second.counts)

    @pytest.mark.parametrize("rates", [[0.2, 1.0], [-0.1, 0.5], [0.5]])
    def test__given_bad_zero_rates__then_config_error(self, rates):
        with pytest.raises(ConfigError):
            simulate_zero_inflated(seed=0, n=50, p=2, zero_rates=rates)

    def test__given_nonpositive_mean_scale__then_config_error(self):
        with pytest.raises(ConfigError):
            simulate_zero_inflated(seed=0, n=50, p=2, mean_scale=0.0)


class TestTruncatedPoissonDraw:
    def test_draws_are_positive_integers(self):
        draws = truncated_poisson_draw(np.full(500, 0.3), generator(0))
        assert np.all(draws >= 1)
        np.testing.assert_array_equal(draws, np.round(draws))

    def test_mean_matches_truncated_mean(self):
        rate = 2.0
        draws = truncated_poisson_draw(np.full(20000, rate), generator(1))
        assert draws.mean() == pytest.approx(rate / (1 - np.exp(-rate)), rel=0.02)
