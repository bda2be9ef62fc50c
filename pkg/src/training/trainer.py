"""
Training procedures: masked pretraining, frozen-backbone fine-tuning,
supervised baseline training, and evaluation.

Sequences are bucketed by length and every bucket is cut into batches of
`batch_size`, so no padding ever enters the math. Each run derives all of
its random streams from `TrainConfig.seed`.
"""
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..autodiff import Adam, backward
from ..data.dataset import Dataset, FeatureSequence, MaskSpec, UnlabeledDataset
from ..data.preprocessing import mask_batch, maskable_sequences
from ..errors import ContractError, NumericError
from ..nn.losses import label_loss, mask_weights, weighted_squared_error
from ..nn.models import (
    ModelConfig,
    ModelKind,
    SequenceModel,
    build_baseline_model,
    build_finetune_model,
    build_pretrain_model,
)
from ..utils.logging import get_logger
from ..utils.seeding import derive_seed, make_rng
from ..utils.timing import TimerContext
from .config import TrainConfig
from .trace import TrainingTrace

logger = get_logger("training.trainer")

# Seed-derivation keys per stage, then per stream within a stage
PRETRAIN_KEY = 1
FINETUNE_KEY = 2
BASELINE_KEY = 3
INIT_STREAM = 0
SHUFFLE_STREAM = 1
MASK_STREAM = 2


def length_batches(
    sequences: Sequence[FeatureSequence],
    batch_size: int,
    rng: Optional[np.random.Generator] = None,
) -> Tuple[List[List[FeatureSequence]], List[str]]:
    """
    Group sequences into equal-length batches.

    With `rng`, the sequences are shuffled first; buckets are emitted in
    order of their first member in that order. Returns (batches, visit order).
    """
    order = rng.permutation(len(sequences)) if rng is not None else np.arange(len(sequences))
    ordered = [sequences[i] for i in order]

    buckets: Dict[int, List[FeatureSequence]] = {}
    for seq in ordered:
        buckets.setdefault(seq.T, []).append(seq)

    batches = []
    for bucket in buckets.values():
        for i in range(0, len(bucket), batch_size):
            batches.append(bucket[i:i + batch_size])
    visit = [s.id for batch in batches for s in batch]
    return batches, visit


def _stack(batch: Sequence[FeatureSequence]) -> np.ndarray:
    return np.stack([s.features for s in batch])


def _finite_loss(stage: str, value: float, epoch: int) -> float:
    if not np.isfinite(value):
        raise NumericError(f"{stage} loss became non-finite in epoch {epoch}")
    return value


def _require_standardized(data: Union[Dataset, UnlabeledDataset], stage: str) -> None:
    if not data.standardized:
        raise ContractError(f"{stage} expects standardized data; apply the training-split statistics first")


def _require_labeled(data: Dataset, stage: str) -> None:
    if len(data) == 0:
        raise ContractError(f"{stage} needs at least one sample")
    if not data.is_fully_labeled():
        missing = [i for i in data.ids if i not in data.labels]
        raise ContractError(f"{stage} needs every sample labeled; unlabeled: {missing[:5]}")


def pretrain(
    unlabeled_train: Union[UnlabeledDataset, Dataset],
    cfg: Optional[TrainConfig] = None,
    model_config: Optional[ModelConfig] = None,
    mask_spec: Optional[MaskSpec] = None,
) -> Tuple[SequenceModel, TrainingTrace]:
    """
    Self-supervised masked-timestep pretraining.

    A labeled Dataset is reduced to its label-free view before anything else
    happens. Every epoch draws a fresh mask for every eligible sequence;
    sequences shorter than the mask are skipped.
    """
    cfg = cfg or TrainConfig()
    mask_spec = mask_spec or MaskSpec()
    data = unlabeled_train.unlabeled() if isinstance(unlabeled_train, Dataset) else unlabeled_train
    _require_standardized(data, "pretraining")

    eligible, short = maskable_sequences(data.sequences, mask_spec)
    if short:
        logger.warning("short_sequences_skipped", count=len(short), mask_length=mask_spec.mask_length, ids=short[:10])
    if not eligible:
        raise ContractError(f"no sequence is at least {mask_spec.mask_length} timesteps long")

    model = build_pretrain_model(model_config, seed=derive_seed(cfg.seed, PRETRAIN_KEY, INIT_STREAM))
    optimizer = Adam(model.parameters(), learning_rate=cfg.learning_rate)
    shuffle_rng = make_rng(cfg.seed, PRETRAIN_KEY, SHUFFLE_STREAM)
    mask_rng = make_rng(cfg.seed, PRETRAIN_KEY, MASK_STREAM)
    trace = TrainingTrace(stage="pretrain", seed=cfg.seed, config=cfg.model_dump())

    logger.info(
        "pretrain_started",
        sequences=len(eligible),
        epochs=cfg.pretrain_epochs,
        recon_loss=cfg.recon_loss,
        parameters=model.num_trainable(),
    )
    for epoch in range(1, cfg.pretrain_epochs + 1):
        with TimerContext() as timer:
            batches, visit = length_batches(eligible, cfg.batch_size, shuffle_rng)
            total = 0.0
            for group in batches:
                original = _stack(group)
                masked, starts = mask_batch(original, mask_spec, mask_rng)
                weights = mask_weights(original.shape, starts, mask_spec.mask_length, cfg.recon_loss)
                loss = weighted_squared_error(model.reconstruct(masked), original, weights)
                optimizer.step(backward(loss))
                total += loss.item() * len(group)
        mean_loss = _finite_loss("pretrain", total / len(eligible), epoch)
        trace.record(mean_loss, timer.seconds, visit)
        logger.info("pretrain_epoch_completed", epoch=epoch, loss=mean_loss, seconds=round(timer.seconds, 3))

    return model, trace


def pooled_features(model: SequenceModel, data: Dataset, batch_size: int = 64) -> np.ndarray:
    """Pooled backbone outputs [n×F] in dataset order, without building a graph."""
    index = {sample_id: i for i, sample_id in enumerate(data.ids)}
    features = np.empty((len(data), model.config.feature_dim))
    batches, _ = length_batches(data.sequences, batch_size)
    for group in batches:
        out = model.pooled_features(_stack(group)).data
        for row, seq in zip(out, group):
            features[index[seq.id]] = row
    return features


def finetune(
    pretrained: SequenceModel,
    labeled_subset: Dataset,
    cfg: Optional[TrainConfig] = None,
) -> Tuple[SequenceModel, TrainingTrace]:
    """
    Train a fresh label head on top of a frozen copy of the pretrained backbone.

    The frozen backbone is deterministic, so pooled features are computed
    once and every epoch trains the head on them.
    """
    cfg = cfg or TrainConfig()
    _require_labeled(labeled_subset, "fine-tuning")
    _require_standardized(labeled_subset, "fine-tuning")

    model = build_finetune_model(
        pretrained,
        seed=derive_seed(cfg.seed, FINETUNE_KEY, INIT_STREAM),
        pooling=cfg.pooling,
    )
    optimizer = Adam(model.parameters(trainable_only=True), learning_rate=cfg.learning_rate)
    shuffle_rng = make_rng(cfg.seed, FINETUNE_KEY, SHUFFLE_STREAM)
    trace = TrainingTrace(stage="finetune", seed=cfg.seed, config=cfg.model_dump())

    ids = labeled_subset.ids
    features = pooled_features(model, labeled_subset)
    targets = labeled_subset.label_matrix(ids)
    n = len(ids)

    logger.info("finetune_started", samples=n, epochs=cfg.epochs, parameters=model.num_trainable())
    for epoch in range(1, cfg.epochs + 1):
        with TimerContext() as timer:
            order = shuffle_rng.permutation(n)
            total = 0.0
            for start in range(0, n, cfg.batch_size):
                rows = order[start:start + cfg.batch_size]
                loss = label_loss(model.predict_from_features(features[rows]), targets[rows])
                optimizer.step(backward(loss))
                total += loss.item() * len(rows)
        mean_loss = _finite_loss("finetune", total / n, epoch)
        trace.record(mean_loss, timer.seconds, [ids[i] for i in order])
        logger.debug("finetune_epoch_completed", epoch=epoch, loss=mean_loss, seconds=round(timer.seconds, 3))

    logger.info("finetune_completed", samples=n, final_loss=trace.final_loss)
    return model, trace


def train_baseline(
    labeled_subset: Dataset,
    cfg: Optional[TrainConfig] = None,
    model_config: Optional[ModelConfig] = None,
) -> Tuple[SequenceModel, TrainingTrace]:
    """Train the fine-tune architecture from a random initialization with nothing frozen."""
    cfg = cfg or TrainConfig()
    _require_labeled(labeled_subset, "baseline training")
    _require_standardized(labeled_subset, "baseline training")

    model = build_baseline_model(
        model_config,
        seed=derive_seed(cfg.seed, BASELINE_KEY, INIT_STREAM),
        pooling=cfg.pooling,
    )
    optimizer = Adam(model.parameters(), learning_rate=cfg.learning_rate)
    shuffle_rng = make_rng(cfg.seed, BASELINE_KEY, SHUFFLE_STREAM)
    trace = TrainingTrace(stage="baseline", seed=cfg.seed, config=cfg.model_dump())
    n = len(labeled_subset)

    logger.info("baseline_started", samples=n, epochs=cfg.epochs, parameters=model.num_trainable())
    for epoch in range(1, cfg.epochs + 1):
        with TimerContext() as timer:
            batches, visit = length_batches(labeled_subset.sequences, cfg.batch_size, shuffle_rng)
            total = 0.0
            for group in batches:
                targets = labeled_subset.label_matrix([s.id for s in group])
                loss = label_loss(model.predict_batch(_stack(group)), targets)
                optimizer.step(backward(loss))
                total += loss.item() * len(group)
        mean_loss = _finite_loss("baseline", total / n, epoch)
        trace.record(mean_loss, timer.seconds, visit)
        logger.debug("baseline_epoch_completed", epoch=epoch, loss=mean_loss, seconds=round(timer.seconds, 3))

    logger.info("baseline_completed", samples=n, final_loss=trace.final_loss)
    return model, trace


def evaluate(model: SequenceModel, val: Dataset, batch_size: int = 64) -> Tuple[np.ndarray, np.ndarray]:
    """
    Predict every validation sample.

    Returns:
        (predictions, labels), both [n×6] with rows in `val.ids` order.
        Predictions are raw; rounding and clamping happen inside the metrics.
    """
    if len(val) == 0:
        raise ContractError("cannot evaluate on an empty validation set")
    _require_labeled(val, "evaluation")
    _require_standardized(val, "evaluation")
    if getattr(model, "kind", None) == ModelKind.PRETRAIN:
        raise ContractError("the pretraining model has no label head")

    index = {sample_id: i for i, sample_id in enumerate(val.ids)}
    preds: Optional[np.ndarray] = None
    batches, _ = length_batches(val.sequences, batch_size)
    for group in batches:
        out = model.predict_batch(_stack(group)).data
        if preds is None:
            preds = np.empty((len(val), out.shape[1]))
        for row, seq in zip(out, group):
            preds[index[seq.id]] = row
    return preds, val.label_matrix()
