"""CSV + schema ingestion into a DataTable."""

from pathlib import Path

import numpy as np
import pandas as pd
from pydantic import ValidationError

from hurdle_glrm.config.constants import CSV_ENCODING
from hurdle_glrm.errors import ConfigError, DomainError
from hurdle_glrm.models.run_config import TableSchema
from hurdle_glrm.models.table import DataTable

from .storage import read_csv


def _first_error(exc: ValidationError) -> str:
    error = exc.errors()[0]
    location = ".".join(str(part) for part in error["loc"])
    return f"{location}: {error['msg']}" if location else error["msg"]


def load_schema(path: Path) -> TableSchema:
    """Parse and validate a JSON schema document."""
    try:
        text = Path(path).read_text(encoding=CSV_ENCODING)
    except OSError as exc:
        raise ConfigError(f"cannot read schema {path}: {exc.strerror}")
    try:
        return TableSchema.model_validate_json(text)
    except ValidationError as exc:
        raise ConfigError(f"invalid schema {path}: {_first_error(exc)}")


def table_from_frame(frame: pd.DataFrame, schema: TableSchema) -> DataTable:
    """Match CSV columns to schema blocks (by name) and build the table."""
    header = [str(c) for c in frame.columns]
    absent = [name for name in schema.names if name not in header]
    if absent:
        raise ConfigError(f"schema column '{absent[0]}' is not in the CSV header {header}")
    extra = [name for name in header if name not in schema.names]
    if extra:
        raise ConfigError(f"CSV column '{extra[0]}' has no schema entry")

    values = np.empty((len(frame), len(schema.columns)))
    for j, name in enumerate(schema.names):
        try:
            values[:, j] = pd.to_numeric(frame[name], errors="raise").to_numpy(dtype=float)
        except (TypeError, ValueError):
            raise DomainError(f"column '{name}' holds non-numeric values")
    try:
        return DataTable(columns=schema.column_specs(), values=values)
    except ValidationError as exc:
        raise DomainError(_first_error(exc))


def load_table(csv_path: Path, schema: TableSchema | Path) -> DataTable:
    """Read a CSV (empty field = missing) and type it with ``schema``."""
    if not isinstance(schema, TableSchema):
        schema = load_schema(schema)
    try:
        frame = read_csv(Path(csv_path))
    except FileNotFoundError:
        raise ConfigError(f"input file {csv_path} does not exist")
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot parse {csv_path}: {exc}")
    return table_from_frame(frame, schema)
