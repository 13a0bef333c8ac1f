"""Fixtures for command-line tests."""

import json
from pathlib import Path

import numpy as np

from hurdle_glrm.services.storage import write_csv

SCHEMA_FILE = "schema.json"
INPUT_FILE = "data.csv"

MAR_BUNDLE_FILES = [
    "complete.csv",
    "mcar.csv",
    "mar.csv",
    "masks.csv",
    "truth_W.csv",
    "truth.csv",
    "simulation.json",
    "manifest.json",
]


def write_count_inputs(directory: Path, counts: np.ndarray) -> tuple[Path, Path]:
    """CSV + schema declaring every column a zero hurdle with Poisson values."""
    names = [f"a{j + 1}" for j in range(counts.shape[1])]
    csv_path = write_csv(directory / INPUT_FILE, counts, names)
    schema = {"columns": [{"name": name, "loss": "poisson", "nu": 0} for name in names]}
    schema_path = directory / SCHEMA_FILE
    schema_path.write_text(json.dumps(schema))
    return csv_path, schema_path


def write_quadratic_inputs(
    directory: Path, values: np.ndarray, schema_names: list[str] | None = None
) -> tuple[Path, Path]:
    names = [f"a{j + 1}" for j in range(values.shape[1])]
    csv_path = write_csv(directory / INPUT_FILE, values, names)
    schema = {"columns": [{"name": name, "loss": "quadratic"} for name in schema_names or names]}
    schema_path = directory / SCHEMA_FILE
    schema_path.write_text(json.dumps(schema))
    return csv_path, schema_path


def read_tree(directory: Path) -> dict[str, bytes]:
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir()) if p.is_file()}
