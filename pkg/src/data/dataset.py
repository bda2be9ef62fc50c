"""
Dataset types: feature sequences, emotion labels, standardization stats, mask settings.
"""
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..errors import ContractError, IngestionError

EMOTIONS: Tuple[str, ...] = ("happy", "sad", "anger", "surprise", "disgust", "fear")
EMOTION_ABBREVIATIONS: Tuple[str, ...] = ("h", "s", "a", "su", "d", "f")
FEATURE_DIM = 74
INTENSITY_MIN = 0.0
INTENSITY_MAX = 3.0


@dataclass(frozen=True, eq=False)
class FeatureSequence:
    """One utterance: [T×D] encoded acoustic parameters."""
    id: str
    features: np.ndarray

    def __post_init__(self):
        features = np.array(self.features, dtype=np.float64)
        if features.ndim != 2 or features.shape[0] < 1:
            raise IngestionError(f"sample {self.id!r}: features must be a non-empty [T×D] matrix, got {features.shape}")
        features.setflags(write=False)
        object.__setattr__(self, "features", features)

    @property
    def T(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True, eq=False)
class EmotionLabel:
    """Six intensities in [0, 3], ordered happy, sad, anger, surprise, disgust, fear."""
    intensities: np.ndarray

    def __post_init__(self):
        values = np.array(self.intensities, dtype=np.float64).reshape(-1)
        if values.shape != (len(EMOTIONS),):
            raise IngestionError(f"a label needs {len(EMOTIONS)} intensities, got {values.shape[0]}")
        if not np.all(np.isfinite(values)) or values.min() < INTENSITY_MIN or values.max() > INTENSITY_MAX:
            raise IngestionError(f"label intensities must lie in [{INTENSITY_MIN}, {INTENSITY_MAX}], got {values.tolist()}")
        values.setflags(write=False)
        object.__setattr__(self, "intensities", values)

    def as_dict(self) -> Dict[str, float]:
        return dict(zip(EMOTIONS, self.intensities.tolist()))


@dataclass(frozen=True, eq=False)
class StandardizationStats:
    """Per-column mean and (floored) population standard deviation of a training split."""
    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        if self.mean.shape != self.std.shape or self.mean.ndim != 1:
            raise ContractError(f"mean/std shapes differ: {self.mean.shape} vs {self.std.shape}")
        if np.any(self.std <= 0):
            raise ContractError("standard deviations must be strictly positive")


@dataclass(frozen=True, eq=False)
class UnlabeledDataset:
    """Sequences only: the view handed to label-free pretraining."""
    sequences: Tuple[FeatureSequence, ...]
    standardization: Optional[StandardizationStats] = None

    def __len__(self) -> int:
        return len(self.sequences)

    @property
    def ids(self) -> List[str]:
        return [s.id for s in self.sequences]

    @property
    def standardized(self) -> bool:
        return self.standardization is not None


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    Sequences plus an optional id → label map.

    Immutable: every transformation returns a new Dataset. `standardization`
    is set once the stats have been applied, which guards against applying
    them twice.
    """
    sequences: Tuple[FeatureSequence, ...]
    labels: Mapping[str, EmotionLabel] = field(default_factory=dict)
    standardization: Optional[StandardizationStats] = None

    def __post_init__(self):
        sequences = tuple(self.sequences)
        object.__setattr__(self, "sequences", sequences)
        object.__setattr__(self, "labels", dict(self.labels))
        ids = [s.id for s in sequences]
        if len(set(ids)) != len(ids):
            seen, dupes = set(), []
            for i in ids:
                if i in seen:
                    dupes.append(i)
                seen.add(i)
            raise IngestionError(f"duplicate sample ids: {sorted(set(dupes))}")
        known = set(ids)
        missing = [i for i in self.labels if i not in known]
        if missing:
            raise IngestionError(f"labels refer to unknown sample ids: {sorted(missing)[:5]}")

    def __len__(self) -> int:
        return len(self.sequences)

    @property
    def ids(self) -> List[str]:
        return [s.id for s in self.sequences]

    @property
    def standardized(self) -> bool:
        return self.standardization is not None

    @property
    def labeled_ids(self) -> List[str]:
        return [s.id for s in self.sequences if s.id in self.labels]

    def is_fully_labeled(self) -> bool:
        return all(s.id in self.labels for s in self.sequences)

    def subset(self, ids: Iterable[str]) -> "Dataset":
        """Dataset restricted to `ids`, in the order given."""
        by_id = {s.id: s for s in self.sequences}
        chosen = []
        for i in ids:
            if i not in by_id:
                raise ContractError(f"unknown sample id {i!r}")
            chosen.append(by_id[i])
        labels = {s.id: self.labels[s.id] for s in chosen if s.id in self.labels}
        return Dataset(tuple(chosen), labels, self.standardization)

    def unlabeled(self) -> UnlabeledDataset:
        return UnlabeledDataset(self.sequences, self.standardization)

    def with_sequences(self, sequences: Sequence[FeatureSequence], stats: Optional[StandardizationStats]) -> "Dataset":
        return replace(self, sequences=tuple(sequences), standardization=stats)

    def label_matrix(self, ids: Optional[Sequence[str]] = None) -> np.ndarray:
        """[n×6] label matrix in `ids` order (dataset order by default)."""
        ids = self.ids if ids is None else ids
        missing = [i for i in ids if i not in self.labels]
        if missing:
            raise ContractError(f"samples without labels: {missing[:5]}")
        return np.stack([self.labels[i].intensities for i in ids]) if ids else np.zeros((0, len(EMOTIONS)))


class MaskSpec(BaseModel):
    """Masked-timestep settings; the sentinel lies far outside the standardized range."""
    model_config = ConfigDict(extra="forbid")

    mask_length: int = Field(30, ge=1, description="Consecutive timesteps replaced per sequence")
    sentinel: float = Field(-30.0, description="Value written into masked positions")
    fraction_hint: float = Field(0.10, gt=0.0, le=1.0, description="Approximate masked share of a typical utterance")


@dataclass
class LoadReport:
    """What ingestion repaired or skipped."""
    samples: int = 0
    labeled: int = 0
    repaired_values: int = 0
    repaired_samples: List[str] = field(default_factory=list)
