"""Tests for model quality metrics."""

import numpy as np
import pytest

from hurdle_glrm.errors import ConfigError, DegenerateColumnError, DomainError
from hurdle_glrm.models.factorization import Factorization
from hurdle_glrm.models.fit_config import FitConfig
from hurdle_glrm.services.diagnostics import (
    column_association,
    column_sd,
    loss_explained,
    misclassification_rate,
    nu_scores,
    roc_auc,
    separation_score,
    weighted_sse,
)
from hurdle_glrm.services.solver import calibrate, fit, offset_only
from test_fixtures.fixtures_tables import (
    RANK_ONE_VALUES,
    count_hurdle_table,
    missing_hurdle_table,
    unscaled_quadratic_table,
)


def association_factorization(binary: list[float], others: dict[str, list[float]]) -> Factorization:
    """A one-hurdle factorization whose loadings are given column by column."""
    names = ["h:binary", "h:value", *others]
    Y = np.column_stack([binary, np.zeros(len(binary)), *others.values()])
    layout = {"h": (0, 2)}
    layout.update({name: (2 + i, 3 + i) for i, name in enumerate(others)})
    return Factorization(
        X=np.zeros((3, len(binary))),
        Y=Y,
        mu=np.zeros(Y.shape[1]),
        column_layout=layout,
        embedded_names=names,
    )


class TestLossExplained:
    def test_offset_only_model_explains_nothing(self):
        table = calibrate(count_hurdle_table(seed=2, n=60, p=3))
        explained = loss_explained(table, FitConfig(k=1), offset_only(table, 1))
        assert explained == pytest.approx(0.0, abs=1e-9)

    def test_missing_nu_table_offset_only(self):
        table, _, _ = missing_hurdle_table(seed=1, n=80, p=3)
        table = calibrate(table)
        explained = loss_explained(table, FitConfig(k=2), offset_only(table, 2))
        assert explained == pytest.approx(0.0, abs=1e-9)

    def test_perfect_reconstruction_explains_everything(self):
        table = unscaled_quadratic_table(RANK_ONE_VALUES)
        config = FitConfig(k=1, seed=3)
        fact, _ = fit(table, config)
        assert loss_explained(table, config, fact) == pytest.approx(1.0, abs=1e-6)


class TestWeightedSSE:
    def test_exact_reconstruction(self):
        values = np.array([[1.0, 2.0], [3.0, 5.0]])
        assert weighted_sse(values, values, np.array([1.0, 2.0])) == 0.0

    def test_single_error_divided_by_sd(self):
        original = np.array([[1.0], [2.0]])
        reconstructed = np.array([[5.0], [2.0]])
        assert weighted_sse(original, reconstructed, np.array([2.0])) == pytest.approx(4.0)

    def test_doubling_data_and_reconstruction_keeps_the_metric(self, rng):
        # Given
        original = rng.normal(size=(50, 3))
        reconstructed = original + rng.normal(scale=0.1, size=(50, 3))

        # When
        plain = weighted_sse(original, reconstructed, column_sd(original))
        doubled = weighted_sse(2 * original, 2 * reconstructed, column_sd(2 * original))

        # Then
        assert doubled == pytest.approx(plain, rel=1e-12)

    def test_unobserved_entries_are_skipped(self):
        original = np.array([[1.0], [np.nan], [3.0]])
        reconstructed = np.array([[1.0], [100.0], [4.0]])
        assert weighted_sse(original, reconstructed, np.array([1.0])) == pytest.approx(1.0)

    def test_column_sd_uses_observed_entries(self):
        values = np.array([[1.0, 0.0], [3.0, 9.0], [np.nan, 0.0]])
        np.testing.assert_allclose(column_sd(values), [np.sqrt(2.0), np.sqrt(27.0)])

    def test__given_zero_sd__then_degenerate_column_error(self):
        values = np.ones((3, 1))
        with pytest.raises(DegenerateColumnError):
            weighted_sse(values, values, np.array([0.0]))

    def test__given_shape_mismatch__then_domain_error(self):
        with pytest.raises(DomainError):
            weighted_sse(np.ones((2, 2)), np.ones((2, 1)), np.ones(2))


class TestMisclassificationRate:
    def test_perfect_agreement(self):
        original = np.array([0.0, 3.0, 0.0, 1.0])
        assert misclassification_rate(original, original.copy()) == 0.0

    def test_all_nu_predictions_on_sixty_percent_nu_column(self):
        original = np.array([0.0] * 6 + [2.0] * 4)
        assert misclassification_rate(original, np.zeros(10)) == pytest.approx(0.4)

    def test_threshold_rule_for_plain_reconstructions(self):
        rate = misclassification_rate(np.array([3.0]), np.array([0.49]), threshold=0.5)
        assert rate == 1.0

    def test_threshold_rule_reads_small_values_as_nu(self):
        rate = misclassification_rate(np.array([0.0, 2.0]), np.array([0.3, 1.7]), threshold=0.5)
        assert rate == 0.0

    def test_joint_relabeling_keeps_the_rate(self, rng):
        # Given
        original = np.where(rng.random(40) < 0.5, 0.0, 2.0)
        reconstructed = np.where(rng.random(40) < 0.5, 0.0, 2.0)

        def swap(v):
            return np.where(v == 0.0, 2.0, 0.0)

        # When / Then
        assert misclassification_rate(swap(original), swap(reconstructed)) == (
            misclassification_rate(original, reconstructed)
        )

    def test_unobserved_entries_are_skipped(self):
        original = np.array([0.0, np.nan, 4.0])
        assert misclassification_rate(original, np.array([0.0, 0.0, 0.0])) == 0.5


class TestRocAuc:
    def test_perfect_separation(self):
        curve, area = roc_auc([0.1, 0.2, 0.8, 0.9], [0, 0, 1, 1])
        assert area == 1.0
        np.testing.assert_array_equal(curve[0], [0.0, 0.0])
        np.testing.assert_array_equal(curve[-1], [1.0, 1.0])

    def test_negated_scores_flip_the_area(self, rng):
        scores = rng.normal(size=200)
        labels = (rng.random(200) < 0.4).astype(int)
        labels[:2] = [0, 1]
        _, area = roc_auc(scores, labels)
        _, flipped = roc_auc(-scores, labels)
        assert flipped == pytest.approx(1.0 - area, abs=1e-12)

    def test_uninformative_scores(self, rng):
        _, area = roc_auc(rng.random(20000), rng.integers(0, 2, size=20000))
        assert area == pytest.approx(0.5, abs=0.05)

    def test_curve_is_monotone_with_fixed_endpoints(self, rng):
        curve, area = roc_auc(rng.normal(size=300), rng.integers(0, 2, size=300))
        assert tuple(curve[0]) == (0.0, 0.0)
        assert tuple(curve[-1]) == (1.0, 1.0)
        assert np.all(np.diff(curve, axis=0) >= 0)
        assert 0.0 <= area <= 1.0

    def test_ties_count_half(self, rng):
        # Given: integer scores with many ties
        scores = rng.integers(0, 4, size=500).astype(float)
        labels = rng.integers(0, 2, size=500)

        # When
        _, area = roc_auc(scores, labels)
        rho, _ = separation_score(scores[labels == 1], scores[labels == 0])

        # Then
        assert area == pytest.approx(rho, abs=1e-12)

    def test__given_single_class__then_domain_error(self):
        with pytest.raises(DomainError, match="positive and one negative"):
            roc_auc([0.1, 0.2, 0.3], [1, 1, 1])

    def test__given_non_binary_labels__then_domain_error(self):
        with pytest.raises(DomainError):
            roc_auc([0.1, 0.2, 0.3], [0, 1, 2])


class TestNuScores:
    def test_offset_only_scores(self):
        table = calibrate(count_hurdle_table(seed=1, n=40, p=2))
        fact = offset_only(table, 1)
        mu = fact.mu.copy()
        mu[0] = 0.0
        scores = nu_scores(fact.model_copy(update={"mu": mu}), "a1")
        np.testing.assert_allclose(scores, np.full(40, 0.5))

    def test__given_unknown_column__then_config_error(self):
        table = calibrate(count_hurdle_table(seed=1, n=40, p=2))
        with pytest.raises(ConfigError, match="zz"):
            nu_scores(offset_only(table, 1), "zz")


class TestColumnAssociation:
    def test_parallel_orthogonal_and_anti_parallel(self):
        # Given
        fact = association_factorization(
            [1.0, 0.0, 0.0],
            {"same": [2.0, 0.0, 0.0], "across": [0.0, 3.0, 0.0], "against": [-1.0, 0.0, 0.0]},
        )

        # When
        rows = {r.column: r for r in column_association(fact, "h")}

        # Then
        assert rows["same"].theta == pytest.approx(1.0)
        assert rows["same"].distance == pytest.approx(0.0, abs=1e-12)
        assert rows["across"].theta == pytest.approx(0.5)
        assert rows["across"].distance == pytest.approx(1.0)
        assert rows["against"].theta == pytest.approx(0.0, abs=1e-12)
        assert rows["against"].distance == pytest.approx(0.0, abs=1e-12)

    def test_column_compared_with_itself(self):
        # Given
        fact = association_factorization([0.3, -1.2, 2.5], {"b": [1.0, 0.0, 0.0]})

        # When
        rows = column_association(fact, "h", include_self=True)

        # Then
        assert rows[0].column == "h:binary"
        assert rows[0].theta == pytest.approx(1.0, abs=1e-7)
        assert rows[0].distance == pytest.approx(0.0, abs=1e-7)

    def test_self_row_is_left_out_by_default(self):
        fact = association_factorization([1.0, 0.0, 0.0], {"b": [1.0, 0.0, 0.0]})
        assert "h:binary" not in [r.column for r in column_association(fact, "h")]

    def test_rows_sorted_by_distance_with_undefined_last(self):
        fact = association_factorization(
            [1.0, 1.0, 0.0],
            {"empty": [0.0, 0.0, 0.0], "far": [1.0, -1.0, 0.0], "near": [1.0, 0.9, 0.0]},
        )
        rows = column_association(fact, "h")
        assert [r.column for r in rows][-2:] == ["h:value", "empty"]
        assert rows[-1].theta is None and rows[-1].distance is None
        distances = [r.distance for r in rows if r.distance is not None]
        assert distances == sorted(distances)
        assert rows[0].column == "near"

    def test_negation_flips_theta_and_keeps_distance(self, rng):
        loadings = rng.normal(size=(2, 3))
        forward = column_association(association_factorization(loadings[0], {"b": loadings[1]}), "h")
        negated = column_association(association_factorization(loadings[0], {"b": -loadings[1]}), "h")
        by_name = {r.column: r for r in negated}
        for row in forward:
            if row.column == "h:value":
                continue
            assert by_name[row.column].theta == pytest.approx(1.0 - row.theta)
            assert by_name[row.column].distance == pytest.approx(row.distance)


class TestSeparationScore:
    def test_complete_separation(self):
        assert separation_score([3.0, 4.0], [1.0, 2.0]) == (1.0, 0.0)

    def test_ties_count_half(self):
        assert separation_score([1.0], [1.0]) == (0.5, 0.25)

    def test__given_empty_group__then_domain_error(self):
        with pytest.raises(DomainError):
            separation_score([], [1.0])
