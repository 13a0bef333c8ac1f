from .baseline import BaselineResult
from .diagnostics import AssociationRow
from .factorization import Factorization, FactorizationManifest, embedded_layout
from .fit_config import FitConfig
from .hurdle import HurdleMode, HurdleSpec
from .loss import (
    LossKind,
    LossSpec,
    ValueDomain,
    logistic,
    poisson,
    quadratic,
    truncated_poisson,
)
from .report import ColumnSummary, FitReport, MethodSummary
from .run_config import ColumnSchema, OutputManifest, RunConfig, TableSchema
from .simulation import (
    MarDatasetBundle,
    MissingCase,
    SimulationManifest,
    ZeroInflatedBundle,
)
from .table import ColumnSpec, DataTable

__all__ = [
    "AssociationRow",
    "BaselineResult",
    "ColumnSchema",
    "ColumnSpec",
    "ColumnSummary",
    "DataTable",
    "Factorization",
    "FactorizationManifest",
    "FitConfig",
    "FitReport",
    "HurdleMode",
    "HurdleSpec",
    "LossKind",
    "LossSpec",
    "MarDatasetBundle",
    "MethodSummary",
    "MissingCase",
    "OutputManifest",
    "RunConfig",
    "SimulationManifest",
    "TableSchema",
    "ValueDomain",
    "ZeroInflatedBundle",
    "embedded_layout",
    "logistic",
    "poisson",
    "quadratic",
    "truncated_poisson",
]
