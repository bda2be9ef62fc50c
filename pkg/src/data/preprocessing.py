"""
Standardization, timestep masking, train/validation splits and labeled subsets.
"""
from typing import List, Sequence, Tuple, Union

import numpy as np

from ..errors import ContractError, DimensionError, ShortSequenceError
from ..utils.logging import get_logger
from .dataset import Dataset, FeatureSequence, MaskSpec, StandardizationStats

logger = get_logger("data.preprocessing")

STD_FLOOR = 1e-8


def compute_standardization(dataset: Dataset) -> StandardizationStats:
    """Per-column mean and population std over every timestep of every sequence."""
    if len(dataset) == 0:
        raise ContractError("cannot standardize an empty dataset")
    stacked = np.concatenate([s.features for s in dataset.sequences], axis=0)
    mean = stacked.mean(axis=0)
    std = stacked.std(axis=0, ddof=0)

    constant = stacked.min(axis=0) == stacked.max(axis=0)
    # Pin constant columns to their value so they standardize to exactly 0
    mean[constant] = stacked[0, constant]
    floored = constant | (std < STD_FLOOR)
    if floored.any():
        logger.warning("zero_variance_columns", columns=np.flatnonzero(floored).tolist(), floor=STD_FLOOR)
    std = np.where(floored, STD_FLOOR, std)
    return StandardizationStats(mean=mean, std=std)


def apply_standardization(dataset: Dataset, stats: StandardizationStats) -> Dataset:
    """Return a new dataset with (x − mean) / std applied column-wise."""
    if dataset.standardized:
        raise ContractError("dataset is already standardized")
    sequences = []
    for seq in dataset.sequences:
        if seq.dim != stats.mean.shape[0]:
            raise DimensionError(f"sample {seq.id!r} feature width", seq.features.shape, stats.mean.shape)
        sequences.append(FeatureSequence(seq.id, (seq.features - stats.mean) / stats.std))
    return dataset.with_sequences(sequences, stats)


def standardize(train: Dataset) -> Tuple[Dataset, StandardizationStats]:
    """Fit statistics on `train` and apply them to it."""
    stats = compute_standardization(train)
    return apply_standardization(train, stats), stats


def mask_sequence(
    seq: Union[FeatureSequence, np.ndarray],
    spec: MaskSpec,
    rng: np.random.Generator,
) -> Tuple[np.ndarray, int]:
    """
    Replace `spec.mask_length` consecutive timesteps (all columns) with the sentinel.

    The start is uniform over {0, …, T − mask_length}. The input is not
    modified; the masked copy and the start index are returned.
    """
    features = seq.features if isinstance(seq, FeatureSequence) else np.asarray(seq, dtype=np.float64)
    steps = features.shape[0]
    if steps < spec.mask_length:
        sample = f"sample {seq.id!r}" if isinstance(seq, FeatureSequence) else "sequence"
        raise ShortSequenceError(f"{sample} has T={steps} < mask length {spec.mask_length}")
    start = int(rng.integers(0, steps - spec.mask_length + 1))
    masked = np.array(features, dtype=np.float64, copy=True)
    masked[start:start + spec.mask_length, :] = spec.sentinel
    return masked, start


def mask_batch(batch: np.ndarray, spec: MaskSpec, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """Mask every sequence of a [B×T×D] batch independently; returns (masked, starts)."""
    masked = np.empty_like(batch, dtype=np.float64)
    starts = np.empty(batch.shape[0], dtype=np.int64)
    for b in range(batch.shape[0]):
        masked[b], starts[b] = mask_sequence(batch[b], spec, rng)
    return masked, starts


def maskable_sequences(sequences: Sequence[FeatureSequence], spec: MaskSpec) -> Tuple[List[FeatureSequence], List[str]]:
    """Split sequences into (long enough to mask, ids of the short ones)."""
    eligible = [s for s in sequences if s.T >= spec.mask_length]
    short = [s.id for s in sequences if s.T < spec.mask_length]
    return eligible, short


def split_train_val(dataset: Dataset, ratio: float = 0.8, seed: int = 0) -> Tuple[Dataset, Dataset]:
    """
    Seeded disjoint partition into training and validation parts.

    The training part receives round(ratio·n) samples (at least one sample
    on each side). Both parts keep the dataset's original sample order.
    """
    if not 0.0 < ratio < 1.0:
        raise ContractError(f"split ratio must lie in (0, 1), got {ratio}")
    n = len(dataset)
    if n < 2:
        raise ContractError(f"need at least 2 samples to split, got {n}")
    n_train = min(max(int(round(ratio * n)), 1), n - 1)

    order = np.random.default_rng(seed).permutation(n)
    train_idx = np.sort(order[:n_train])
    val_idx = np.sort(order[n_train:])
    ids = dataset.ids
    train = dataset.subset([ids[i] for i in train_idx])
    val = dataset.subset([ids[i] for i in val_idx])
    logger.debug("dataset_split", train=len(train), val=len(val), seed=seed)
    return train, val


def sample_labeled_subset(train: Dataset, n: int, seed: int) -> Dataset:
    """`n` distinct labeled samples drawn uniformly without replacement."""
    pool = train.labeled_ids
    if n < 1:
        raise ContractError(f"subset size must be positive, got {n}")
    if n > len(pool):
        raise ContractError(f"requested {n} labeled samples but only {len(pool)} are available")
    chosen = np.random.default_rng(seed).choice(len(pool), size=n, replace=False)
    return train.subset([pool[i] for i in chosen])


def split_and_standardize(
    dataset: Dataset,
    ratio: float = 0.8,
    seed: int = 0,
) -> Tuple[Dataset, Dataset, StandardizationStats]:
    """Split, fit statistics on the training part, and apply them to both parts."""
    train, val = split_train_val(dataset, ratio, seed)
    train, stats = standardize(train)
    return train, apply_standardization(val, stats), stats
