"""Classical Malus-law and quantum singlet models of two-channel polarization correlations."""

from .chsh import ChshResult, ChshSettings, chsh_statistic, maximize_chsh
from .core import (
    Angle,
    CoincidenceTable,
    CountRecord,
    DomainError,
    Port,
    SourceConfig,
    SourceMode,
    normalize_angle,
    table_from_counts,
)
from .models import (
    ModelKind,
    TwoQubitState,
    born_table,
    chi,
    classical_table,
    quantum_table_closed,
    visibility,
    visibility_result,
)
from .montecarlo import TrialPlan, estimate_table, run_trials
from .report import ScanRow, ScanSpec, emit_csv, emit_json, scan

__all__ = [
    "Angle",
    "ChshResult",
    "ChshSettings",
    "CoincidenceTable",
    "CountRecord",
    "DomainError",
    "ModelKind",
    "Port",
    "ScanRow",
    "ScanSpec",
    "SourceConfig",
    "SourceMode",
    "TrialPlan",
    "TwoQubitState",
    "born_table",
    "chi",
    "chsh_statistic",
    "classical_table",
    "emit_csv",
    "emit_json",
    "estimate_table",
    "maximize_chsh",
    "normalize_angle",
    "quantum_table_closed",
    "run_trials",
    "scan",
    "table_from_counts",
    "visibility",
    "visibility_result",
]
