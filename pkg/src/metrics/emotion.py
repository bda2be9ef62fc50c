"""
Emotion-intensity metrics: 4-class accuracy and mean absolute error,
overall and per emotion.
"""
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Tuple, Union

import numpy as np
import pandas as pd

from ..data.dataset import EMOTION_ABBREVIATIONS, EMOTIONS
from ..errors import ContractError, DimensionError, NumericError

NUM_CLASSES = 4
CLASS_MIN = 0
CLASS_MAX = NUM_CLASSES - 1

MAE_COLUMNS = ["overall_mae"] + [f"mae_{a}" for a in EMOTION_ABBREVIATIONS]
ACC4_COLUMNS = ["acc4"] + [f"acc4_{a}" for a in EMOTION_ABBREVIATIONS]
METRIC_COLUMNS = MAE_COLUMNS + ACC4_COLUMNS
REPORT_COLUMNS = ["model", "budget", "repeat"] + METRIC_COLUMNS


def round_class(x: float) -> int:
    """
    Half-up rounding to an intensity class, clamped to {0, 1, 2, 3}.

    Args:
        x: A finite intensity (prediction or label)

    Returns:
        floor(x) if x − floor(x) < 0.5 else ceil(x), clamped to [0, 3]
    """
    x = float(x)
    if not math.isfinite(x):
        raise NumericError(f"cannot round non-finite value {x}")
    base = math.floor(x)
    rounded = base + 1 if x - base >= 0.5 else base
    return int(min(max(rounded, CLASS_MIN), CLASS_MAX))


def round_classes(values: np.ndarray) -> np.ndarray:
    """Vectorized `round_class`."""
    values = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise NumericError("cannot round non-finite values")
    base = np.floor(values)
    rounded = base + (values - base >= 0.5)
    return np.clip(rounded, CLASS_MIN, CLASS_MAX).astype(np.int64)


def _check_pair(pred: np.ndarray, truth: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    pred = np.asarray(pred, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if pred.ndim != 2 or pred.shape != truth.shape:
        raise DimensionError("prediction and truth matrices must share an [n×6] shape", pred.shape, truth.shape)
    if pred.shape[1] != len(EMOTIONS):
        raise DimensionError(f"expected {len(EMOTIONS)} emotion columns", pred.shape)
    if pred.shape[0] < 1:
        raise ContractError("metrics need at least one sample")
    return pred, truth


def _column(j: int) -> int:
    if isinstance(j, bool) or not isinstance(j, (int, np.integer)) or not 1 <= j <= len(EMOTIONS):
        raise ContractError(f"emotion index must be an integer in 1..{len(EMOTIONS)}, got {j!r}")
    return int(j) - 1


def acc4_overall(pred: np.ndarray, truth: np.ndarray) -> float:
    """Fraction of the 6n rounded entries whose classes agree."""
    pred, truth = _check_pair(pred, truth)
    agree = round_classes(pred) == round_classes(truth)
    return int(np.count_nonzero(agree)) / agree.size


def acc4_per_emotion(pred: np.ndarray, truth: np.ndarray, j: int) -> float:
    """Agreement fraction of column j (1-based, happy=1 … fear=6)."""
    pred, truth = _check_pair(pred, truth)
    col = _column(j)
    agree = round_classes(pred[:, col]) == round_classes(truth[:, col])
    return int(np.count_nonzero(agree)) / agree.size


def mae_overall(pred: np.ndarray, truth: np.ndarray) -> float:
    """Mean absolute error over all 6n raw entries (no rounding or clamping)."""
    pred, truth = _check_pair(pred, truth)
    return float(np.abs(pred - truth).mean())


def mae_per_emotion(pred: np.ndarray, truth: np.ndarray, j: int) -> float:
    pred, truth = _check_pair(pred, truth)
    col = _column(j)
    return float(np.abs(pred[:, col] - truth[:, col]).mean())


@dataclass(frozen=True)
class MetricsReport:
    """All metrics of one evaluation."""
    overall_mae: float
    mae_per_emotion: Tuple[float, ...]
    overall_acc4: float
    acc4_per_emotion: Tuple[float, ...]

    def as_dict(self) -> Dict[str, float]:
        values = [self.overall_mae, *self.mae_per_emotion, self.overall_acc4, *self.acc4_per_emotion]
        return dict(zip(METRIC_COLUMNS, values))

    def to_row(self, model: str, budget: int, repeat: int) -> Dict[str, Union[str, int, float]]:
        return {"model": model, "budget": int(budget), "repeat": int(repeat), **self.as_dict()}


def compute_metrics(pred: np.ndarray, truth: np.ndarray) -> MetricsReport:
    pred, truth = _check_pair(pred, truth)
    emotions = range(1, len(EMOTIONS) + 1)
    return MetricsReport(
        overall_mae=mae_overall(pred, truth),
        mae_per_emotion=tuple(mae_per_emotion(pred, truth, j) for j in emotions),
        overall_acc4=acc4_overall(pred, truth),
        acc4_per_emotion=tuple(acc4_per_emotion(pred, truth, j) for j in emotions),
    )


def metrics_frame(rows: Iterable[Dict], extra_columns: List[str] = ()) -> pd.DataFrame:
    """Rows in the report column order (plus any extra columns)."""
    return pd.DataFrame(list(rows), columns=REPORT_COLUMNS + list(extra_columns))


def write_metrics_csv(rows: Iterable[Dict], path: Union[str, Path], extra_columns: List[str] = ()) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    metrics_frame(rows, extra_columns).to_csv(path, index=False)
    return path
