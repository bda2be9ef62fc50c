"""
Label-budget experiments.
"""
from .sweep import (
    DEFAULT_BUDGETS,
    MODEL_KINDS,
    SweepConfig,
    SweepRecord,
    SweepReport,
    aggregate,
    cell_seed,
    emotion_benefit,
    fingerprint,
    gap_trend,
    preflight_sweep,
    run_cell,
    run_sweep,
    write_sweep_outputs,
)

__all__ = [
    "DEFAULT_BUDGETS",
    "MODEL_KINDS",
    "SweepConfig",
    "SweepRecord",
    "SweepReport",
    "aggregate",
    "cell_seed",
    "emotion_benefit",
    "fingerprint",
    "gap_trend",
    "preflight_sweep",
    "run_cell",
    "run_sweep",
    "write_sweep_outputs",
]
