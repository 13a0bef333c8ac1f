"""On-disk formats for factorizations, simulated bundles and run outputs.

Tables are comma-separated UTF-8 with a header row and floats written with
``%.17g``, so equal arrays always produce byte-identical files.
"""

import hashlib
import json
from pathlib import Path

import numpy as np
import pandas as pd
from pydantic import BaseModel

from hurdle_glrm.config.constants import CSV_DELIMITER, CSV_ENCODING, CSV_FLOAT_FORMAT
from hurdle_glrm.config.settings import settings
from hurdle_glrm.errors import ConfigError
from hurdle_glrm.models.factorization import Factorization, FactorizationManifest
from hurdle_glrm.models.run_config import OutputManifest, RunConfig
from hurdle_glrm.models.simulation import (
    MarDatasetBundle,
    SimulationManifest,
    ZeroInflatedBundle,
)
from hurdle_glrm.models.table import ColumnSpec, DataTable


def write_csv(path: Path, values: np.ndarray, header: list[str] | None = None) -> Path:
    values = np.asarray(values)
    if values.ndim == 1:
        values = values[:, None]
    frame = pd.DataFrame(values, columns=header)
    return write_frame(path, frame)


def write_frame(path: Path, frame: pd.DataFrame) -> Path:
    frame.to_csv(
        path,
        sep=CSV_DELIMITER,
        index=False,
        float_format=CSV_FLOAT_FORMAT,
        na_rep="",
        encoding=CSV_ENCODING,
        lineterminator="\n",
    )
    return path


def read_csv(path: Path) -> pd.DataFrame:
    return pd.read_csv(
        path,
        sep=CSV_DELIMITER,
        encoding=CSV_ENCODING,
        keep_default_na=False,
        na_values=[""],
        float_precision="round_trip",
    )


def write_json(path: Path, payload: BaseModel | dict | list) -> Path:
    if isinstance(payload, BaseModel):
        payload = payload.model_dump(mode="json")
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding=CSV_ENCODING)
    return path


# ---------------------------------------------------------------------------
# Factorizations
# ---------------------------------------------------------------------------


def save_factorization(fact: Factorization, table: DataTable, directory: Path) -> list[str]:
    """Write X.csv, Y.csv, mu.csv and layout.json; returns the file names."""
    directory.mkdir(parents=True, exist_ok=True)
    write_csv(directory / "X.csv", fact.X, [f"x{i + 1}" for i in range(fact.k)])
    write_csv(directory / "Y.csv", fact.Y, fact.embedded_names)
    write_csv(directory / "mu.csv", fact.mu[None, :], fact.embedded_names)
    manifest = FactorizationManifest(
        k=fact.k,
        n_rows=fact.X.shape[0],
        embedded_names=fact.embedded_names,
        column_layout=fact.column_layout,
        columns=table.columns,
    )
    write_json(directory / "layout.json", manifest)
    return ["X.csv", "Y.csv", "mu.csv", "layout.json"]


def load_factorization(directory: Path) -> tuple[Factorization, list[ColumnSpec]]:
    """Read a factorization written by ``save_factorization``."""
    layout_path = directory / "layout.json"
    if not layout_path.exists():
        raise ConfigError(f"no layout.json in {directory}")
    manifest = FactorizationManifest.model_validate_json(layout_path.read_text(CSV_ENCODING))
    fact = Factorization(
        X=read_csv(directory / "X.csv").to_numpy(dtype=float),
        Y=read_csv(directory / "Y.csv").to_numpy(dtype=float),
        mu=read_csv(directory / "mu.csv").to_numpy(dtype=float)[0],
        column_layout=manifest.column_layout,
        embedded_names=manifest.embedded_names,
    )
    return fact, manifest.columns


# ---------------------------------------------------------------------------
# Simulated bundles
# ---------------------------------------------------------------------------


def _column_names(p: int) -> list[str]:
    return [f"a{j + 1}" for j in range(p)]


def write_mar_bundle(bundle: MarDatasetBundle, directory: Path) -> list[str]:
    """Complete table, both masked tables, masks, truth parameters and a manifest."""
    directory.mkdir(parents=True, exist_ok=True)
    names = _column_names(bundle.complete.shape[1])
    write_csv(directory / "complete.csv", bundle.complete, names)
    write_csv(directory / "mcar.csv", bundle.masked_values("mcar"), names)
    write_csv(directory / "mar.csv", bundle.masked_values("mar"), names)
    write_csv(
        directory / "masks.csv",
        np.column_stack([bundle.mcar_mask, bundle.mar_mask]).astype(int),
        ["mcar", "mar"],
    )
    write_csv(
        directory / "truth_W.csv",
        bundle.truth_W,
        [f"w{i + 1}" for i in range(bundle.truth_W.shape[1])],
    )
    write_csv(
        directory / "truth.csv",
        np.column_stack([bundle.truth_mu, bundle.truth_sigma]),
        ["mu", "sigma2"],
    )
    files = ["complete.csv", "mcar.csv", "mar.csv", "masks.csv", "truth_W.csv", "truth.csv"]
    manifest = SimulationManifest(
        kind="mar",
        seed=bundle.seed,
        generator=bundle.generator,
        numpy_version=np.__version__,
        package_version=settings.package_version,
        files=files,
        alpha=bundle.alpha,
        mcar_missing=int(bundle.mcar_mask.sum()),
        mar_missing=int(bundle.mar_mask.sum()),
    )
    write_json(directory / "simulation.json", manifest)
    return files + ["simulation.json"]


def write_zero_inflated_bundle(bundle: ZeroInflatedBundle, directory: Path) -> list[str]:
    """Count table plus a manifest with target and realised zero rates."""
    directory.mkdir(parents=True, exist_ok=True)
    write_csv(directory / "counts.csv", bundle.counts, _column_names(bundle.counts.shape[1]))
    manifest = SimulationManifest(
        kind="zero_inflated",
        seed=bundle.seed,
        generator=bundle.generator,
        numpy_version=np.__version__,
        package_version=settings.package_version,
        files=["counts.csv"],
        zero_rates=bundle.zero_rates,
        realised_zero_rates=bundle.realised_zero_rates,
    )
    write_json(directory / "simulation.json", manifest)
    return ["counts.csv", "simulation.json"]


# ---------------------------------------------------------------------------
# Run manifests
# ---------------------------------------------------------------------------


def config_hash(config: RunConfig) -> str:
    """sha256 of the run configuration's canonical JSON form."""
    canonical = json.dumps(config.model_dump(mode="json"), sort_keys=True)
    return hashlib.sha256(canonical.encode(CSV_ENCODING)).hexdigest()


def write_manifest(config: RunConfig, files: list[str]) -> Path:
    """manifest.json under ``config.out`` listing every written file."""
    manifest = OutputManifest(
        command=config.command,
        config_hash=config_hash(config),
        package_version=settings.package_version,
        files=sorted(set(files)),
    )
    return write_json(config.out / "manifest.json", manifest)
