"""
Label-budget sweep: pretrained (frozen backbone + head) vs baseline models.

Every (budget, repeat) cell samples one labeled subset, trains both model
kinds on it, and evaluates both on the shared validation split.
"""
import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..data.dataset import EMOTION_ABBREVIATIONS, EMOTIONS, Dataset
from ..data.preprocessing import sample_labeled_subset
from ..errors import ContractError
from ..metrics.emotion import (
    CLASS_MAX,
    CLASS_MIN,
    METRIC_COLUMNS,
    REPORT_COLUMNS,
    MetricsReport,
    compute_metrics,
)
from ..nn.models import ModelKind, SequenceModel
from ..training.config import TrainConfig
from ..training.trainer import evaluate, finetune, train_baseline
from ..utils.logging import get_logger
from ..utils.seeding import derive_seed
from ..utils.timing import TimerContext

logger = get_logger("experiment.sweep")

DEFAULT_BUDGETS: List[int] = list(range(20, 201, 15)) + list(range(400, 1201, 200))
MODEL_KINDS: Tuple[str, ...] = ("pretrained", "baseline")
FINGERPRINT_COLUMN = "subset_fingerprint"

REPORT_FILE = "sweep_report.csv"
AGGREGATES_FILE = "sweep_aggregates.csv"
INFO_FILE = "sweep_info.yaml"
EXTERNAL_RECON_LOSS = "unknown (external checkpoint)"


class SweepConfig(BaseModel):
    """Budgets, repeats and seeds of one sweep."""
    model_config = ConfigDict(extra="forbid")

    budgets: List[int] = Field(default_factory=lambda: list(DEFAULT_BUDGETS))
    repeats: int = Field(3, ge=1)
    base_seed: int = Field(0, ge=0)
    max_workers: int = Field(1, ge=1, description="Cells trained concurrently")
    train: TrainConfig = Field(default_factory=TrainConfig)

    @field_validator("budgets")
    @classmethod
    def _strictly_increasing(cls, budgets: List[int]) -> List[int]:
        if not budgets:
            raise ValueError("at least one budget is required")
        if budgets[0] < 1:
            raise ValueError("budgets must be positive")
        if any(later <= earlier for earlier, later in zip(budgets, budgets[1:])):
            raise ValueError(f"budgets must be strictly increasing, got {budgets}")
        return budgets


@dataclass(frozen=True)
class SweepRecord:
    model_kind: str
    budget: int
    repeat: int
    seed: int
    subset_fingerprint: str
    metrics: MetricsReport

    def to_row(self) -> Dict:
        return {**self.metrics.to_row(self.model_kind, self.budget, self.repeat), FINGERPRINT_COLUMN: self.subset_fingerprint}


def _canonical_key(record: SweepRecord) -> Tuple[int, int, int]:
    return MODEL_KINDS.index(record.model_kind), record.budget, record.repeat


@dataclass
class SweepReport:
    records: List[SweepRecord]
    aggregates: pd.DataFrame
    validation_fingerprint: str = ""

    def records_frame(self) -> pd.DataFrame:
        return pd.DataFrame([r.to_row() for r in self.records], columns=REPORT_COLUMNS + [FINGERPRINT_COLUMN])


def fingerprint(ids: Iterable[str]) -> str:
    """Order-insensitive digest of a set of sample ids."""
    digest = hashlib.sha256("\n".join(sorted(ids)).encode("utf-8"))
    return digest.hexdigest()[:16]


def cell_seed(base_seed: int, budget: int, repeat: int) -> int:
    return derive_seed(base_seed, budget, repeat)


def _check_cell_seeds(cfg: SweepConfig) -> Dict[Tuple[int, int], int]:
    seeds = {(b, r): cell_seed(cfg.base_seed, b, r) for b in cfg.budgets for r in range(cfg.repeats)}
    if len(set(seeds.values())) != len(seeds):
        raise ContractError("derived cell seeds collide; choose another base_seed")
    return seeds


def run_cell(
    pretrained: SequenceModel,
    train: Dataset,
    val: Dataset,
    budget: int,
    repeat: int,
    seed: int,
    train_cfg: TrainConfig,
) -> List[SweepRecord]:
    """Train and evaluate both model kinds on one labeled subset."""
    subset = sample_labeled_subset(train, budget, seed)
    subset_id = fingerprint(subset.ids)
    cfg = train_cfg.model_copy(update={"seed": seed})

    logger.info("sweep_cell_started", budget=budget, repeat=repeat, seed=seed, subset=subset_id)
    with TimerContext() as timer:
        tuned, _ = finetune(pretrained, subset, cfg)
        baseline, _ = train_baseline(subset, cfg, pretrained.config)
        records = [
            SweepRecord(kind, budget, repeat, seed, subset_id, compute_metrics(*evaluate(model, val)))
            for kind, model in zip(MODEL_KINDS, (tuned, baseline))
        ]
    logger.info(
        "sweep_cell_completed",
        budget=budget,
        repeat=repeat,
        seconds=round(timer.seconds, 3),
        pretrained_mae=records[0].metrics.overall_mae,
        baseline_mae=records[1].metrics.overall_mae,
    )
    return records


def preflight_sweep(cfg: SweepConfig, train: Dataset, val: Dataset) -> Dict[Tuple[int, int], int]:
    """Check budgets, the validation split and cell seeds; returns the seed of every cell."""
    pool = len(train.labeled_ids)
    if cfg.budgets[-1] > pool:
        logger.error("sweep_preflight_failed", max_budget=cfg.budgets[-1], labeled_pool=pool)
        raise ContractError(f"budget {cfg.budgets[-1]} exceeds the {pool} labeled training samples")
    if len(val) == 0 or not val.is_fully_labeled():
        logger.error("sweep_preflight_failed", reason="validation split empty or partly unlabeled")
        raise ContractError("the validation split must be non-empty and fully labeled")
    return _check_cell_seeds(cfg)


def run_sweep(cfg: SweepConfig, pretrained: SequenceModel, train: Dataset, val: Dataset) -> SweepReport:
    """
    Run every (budget, repeat) cell and aggregate the results.

    `train` and `val` are the fixed, standardized splits shared by all
    cells. All pre-flight checks run before any training starts.
    """
    if pretrained.kind != ModelKind.PRETRAIN:
        raise ContractError(f"the sweep needs a pretrain checkpoint, got {pretrained.kind.value}")
    seeds = preflight_sweep(cfg, train, val)

    logger.info(
        "sweep_started",
        budgets=cfg.budgets,
        repeats=cfg.repeats,
        cells=len(seeds),
        max_workers=cfg.max_workers,
        validation=len(val),
    )

    def job(cell: Tuple[int, int]) -> List[SweepRecord]:
        budget, repeat = cell
        return run_cell(pretrained, train, val, budget, repeat, seeds[cell], cfg.train)

    cells = list(seeds)
    if cfg.max_workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.max_workers) as executor:
            results = list(executor.map(job, cells))
    else:
        results = [job(cell) for cell in cells]

    records = sorted((r for cell_records in results for r in cell_records), key=_canonical_key)
    report = SweepReport(records=records, aggregates=aggregate(records), validation_fingerprint=fingerprint(val.ids))
    logger.info("sweep_completed", records=len(records))
    return report


def aggregate(records: Sequence[SweepRecord]) -> pd.DataFrame:
    """
    Mean and sample standard deviation (n − 1; 0 for a single repeat) of every
    metric per (model, budget), in canonical order.
    """
    columns = ["model", "budget", "n"] + [f"{m}_{s}" for m in METRIC_COLUMNS for s in ("mean", "std")]
    if not records:
        return pd.DataFrame(columns=columns)

    ordered = sorted(records, key=_canonical_key)
    frame = pd.DataFrame([r.to_row() for r in ordered])
    grouped = frame.groupby(["model", "budget"], sort=False)[METRIC_COLUMNS]
    means = grouped.mean().add_suffix("_mean")
    # pandas gives NaN for a single-member group
    stds = grouped.std(ddof=1).fillna(0.0).add_suffix("_std")
    counts = grouped.size().rename("n")
    result = pd.concat([counts, means, stds], axis=1).reset_index()
    result["budget"] = result["budget"].astype(int)
    return result[columns]


def _aggregates_of(report: Union[SweepReport, pd.DataFrame]) -> pd.DataFrame:
    return report.aggregates if isinstance(report, SweepReport) else report


def gap_trend(report: Union[SweepReport, pd.DataFrame], metric: str = "overall_mae") -> List[Tuple[int, float]]:
    """Signed pretrained − baseline mean gap of `metric` per budget, ordered by budget."""
    if metric not in METRIC_COLUMNS:
        raise ContractError(f"unknown metric {metric!r}; expected one of {METRIC_COLUMNS}")
    aggregates = _aggregates_of(report)
    column = f"{metric}_mean"
    pivot = aggregates.pivot(index="budget", columns="model", values=column).sort_index()
    missing = [k for k in MODEL_KINDS if k not in pivot.columns]
    if missing or pivot[list(MODEL_KINDS)].isna().any().any():
        raise ContractError("aggregates are incomplete; both model kinds are needed at every budget")
    return [(int(b), float(p - q)) for b, p, q in zip(pivot.index, pivot["pretrained"], pivot["baseline"])]


def emotion_benefit(
    report: Union[SweepReport, pd.DataFrame],
    budgets: Optional[Sequence[int]] = None,
    metric: Literal["mae", "acc4"] = "mae",
) -> Dict[str, float]:
    """
    Mean per-emotion advantage of the pretrained model over a range of budgets.

    Positive values always favour the pretrained model: baseline − pretrained
    for MAE, pretrained − baseline for accuracy.
    """
    if metric not in ("mae", "acc4"):
        raise ContractError(f"metric must be 'mae' or 'acc4', got {metric!r}")
    sign = -1.0 if metric == "mae" else 1.0
    benefit = {}
    for emotion, abbreviation in zip(EMOTIONS, EMOTION_ABBREVIATIONS):
        gaps = gap_trend(report, f"{metric}_{abbreviation}")
        if budgets is not None:
            wanted = set(budgets)
            gaps = [(b, g) for b, g in gaps if b in wanted]
        if not gaps:
            raise ContractError(f"none of the budgets {list(budgets or [])} were swept")
        benefit[emotion] = sign * float(np.mean([g for _, g in gaps]))
    return benefit


def write_sweep_outputs(
    report: SweepReport,
    out_dir: Union[str, Path],
    cfg: SweepConfig,
    recon_loss: Optional[str] = None,
) -> Dict[str, Path]:
    """
    Write the per-record CSV, the aggregates CSV, and the run metadata.

    `recon_loss` is the mode the backbone was pretrained with; None when the
    checkpoint came from elsewhere.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "report": out_dir / REPORT_FILE,
        "aggregates": out_dir / AGGREGATES_FILE,
        "info": out_dir / INFO_FILE,
    }
    report.records_frame().to_csv(paths["report"], index=False)
    report.aggregates.to_csv(paths["aggregates"], index=False)

    info = {
        "records": len(report.records),
        "budgets": list(cfg.budgets),
        "repeats": cfg.repeats,
        "base_seed": cfg.base_seed,
        "recon_loss": recon_loss or EXTERNAL_RECON_LOSS,
        "pooling": cfg.train.pooling,
        "class_clamp": [CLASS_MIN, CLASS_MAX],
        "std_convention": "sample (n-1), 0 for a single repeat",
        "validation_fingerprint": report.validation_fingerprint,
    }
    paths["info"].write_text(yaml.safe_dump(info, sort_keys=False), encoding="utf-8")
    logger.info("sweep_outputs_written", out_dir=str(out_dir), records=len(report.records))
    return paths
