"""
Dataset summaries: sequence lengths and the rounded-class distribution of labels.
"""
from typing import Any, Dict

import numpy as np
import pandas as pd

from ..data.dataset import EMOTIONS, Dataset
from .emotion import CLASS_MAX, CLASS_MIN, round_classes


def length_summary(dataset: Dataset, mask_length: int) -> Dict[str, Any]:
    """Sample counts and length statistics; `short` counts sequences that cannot be masked."""
    lengths = np.array([s.T for s in dataset.sequences], dtype=np.int64)
    if lengths.size == 0:
        return {"samples": 0, "labeled": 0, "short": 0}
    return {
        "samples": int(lengths.size),
        "labeled": len(dataset.labeled_ids),
        "t_min": int(lengths.min()),
        "t_max": int(lengths.max()),
        "t_mean": float(lengths.mean()),
        "t_median": float(np.median(lengths)),
        "short": int(np.count_nonzero(lengths < mask_length)),
        "mask_length": int(mask_length),
    }


def label_class_distribution(dataset: Dataset) -> pd.DataFrame:
    """
    Count of labeled samples per (emotion, rounded class).

    Rows are emotions in label order; columns are the classes 0..3.
    """
    classes = list(range(CLASS_MIN, CLASS_MAX + 1))
    ids = dataset.labeled_ids
    if not ids:
        return pd.DataFrame(0, index=list(EMOTIONS), columns=classes)
    rounded = round_classes(dataset.label_matrix(ids))
    counts = {
        emotion: np.bincount(rounded[:, i], minlength=len(classes))[: len(classes)]
        for i, emotion in enumerate(EMOTIONS)
    }
    frame = pd.DataFrame.from_dict(counts, orient="index", columns=classes)
    frame.index.name = "emotion"
    return frame
