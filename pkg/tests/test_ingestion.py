"""Tests for CSV and schema ingestion."""

import json
from pathlib import Path

import numpy as np
import pytest

from hurdle_glrm.errors import ConfigError, DomainError
from hurdle_glrm.models.hurdle import HurdleSpec
from hurdle_glrm.services.ingestion import load_schema, load_table
from test_fixtures.fixtures_cli import INPUT_FILE, SCHEMA_FILE, write_quadratic_inputs


def write_schema(directory: Path, columns: list[dict]) -> Path:
    path = directory / SCHEMA_FILE
    path.write_text(json.dumps({"columns": columns}))
    return path


class TestLoadSchema:
    def test_hurdle_and_plain_columns(self, tmp_path):
        # Given
        path = write_schema(
            tmp_path,
            [
                {"name": "hours", "loss": "quadratic", "nu": "missing"},
                {"name": "visits", "loss": "poisson", "nu": 0, "c_multiplier": 2.0},
                {"name": "income", "loss": "quadratic"},
            ],
        )

        # When
        specs = load_schema(path).column_specs()

        # Then
        assert specs[0].loss.nu_is_missing
        assert isinstance(specs[1].loss, HurdleSpec) and specs[1].c_multiplier == 2.0
        assert not specs[2].is_hurdle

    def test__given_unknown_loss__then_config_error(self, tmp_path):
        path = write_schema(tmp_path, [{"name": "a1", "loss": "huber"}])
        with pytest.raises(ConfigError, match="invalid schema"):
            load_schema(path)

    def test__given_duplicate_names__then_config_error(self, tmp_path):
        path = write_schema(
            tmp_path, [{"name": "a1", "loss": "quadratic"}, {"name": "a1", "loss": "poisson"}]
        )
        with pytest.raises(ConfigError, match="more than once"):
            load_schema(path)

    def test__given_multiplier_without_nu__then_config_error(self, tmp_path):
        path = write_schema(tmp_path, [{"name": "a1", "loss": "poisson", "c_multiplier": 1.0}])
        with pytest.raises(ConfigError, match="c_multiplier"):
            load_schema(path)

    def test__given_missing_file__then_config_error(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read schema"):
            load_schema(tmp_path / "absent.json")


class TestLoadTable:
    def test_empty_fields_are_unobserved(self, tmp_path):
        # Given
        (tmp_path / INPUT_FILE).write_text("a1,a2\n1.0,2\n,3\n2.5,4\n")
        schema = write_schema(
            tmp_path, [{"name": "a2", "loss": "poisson"}, {"name": "a1", "loss": "quadratic"}]
        )

        # When
        table = load_table(tmp_path / INPUT_FILE, schema)

        # Then: schema order wins
        assert table.names == ["a2", "a1"]
        np.testing.assert_array_equal(table.observed[:, 1], [True, False, True])
        np.testing.assert_array_equal(table.values[:, 0], [2.0, 3.0, 4.0])

    def test__given_schema_column_absent_from_csv__then_error_names_it(self, tmp_path):
        csv_path, schema = write_quadratic_inputs(
            tmp_path, np.ones((3, 2)), schema_names=["a1", "ghost"]
        )
        with pytest.raises(ConfigError, match="'ghost'"):
            load_table(csv_path, schema)

    def test__given_csv_column_without_schema__then_config_error(self, tmp_path):
        csv_path, schema = write_quadratic_inputs(tmp_path, np.ones((3, 2)), schema_names=["a1"])
        with pytest.raises(ConfigError, match="'a2' has no schema entry"):
            load_table(csv_path, schema)

    def test__given_text_values__then_domain_error(self, tmp_path):
        (tmp_path / INPUT_FILE).write_text("a1\n1\nlots\n")
        schema = write_schema(tmp_path, [{"name": "a1", "loss": "quadratic"}])
        with pytest.raises(DomainError, match="non-numeric"):
            load_table(tmp_path / INPUT_FILE, schema)

    def test__given_values_outside_the_domain__then_domain_error(self, tmp_path):
        (tmp_path / INPUT_FILE).write_text("a1\n1\n2.5\n")
        schema = write_schema(tmp_path, [{"name": "a1", "loss": "poisson"}])
        with pytest.raises(DomainError, match="poisson domain"):
            load_table(tmp_path / INPUT_FILE, schema)

    def test__given_missing_csv__then_config_error(self, tmp_path):
        schema = write_schema(tmp_path, [{"name": "a1", "loss": "quadratic"}])
        with pytest.raises(ConfigError, match="does not exist"):
            load_table(tmp_path / "absent.csv", schema)
