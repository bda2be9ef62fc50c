"""
Reconstruction and label losses.
"""
from typing import Tuple

import numpy as np

from ..autodiff import Tensor, mul, sub, sum_all
from ..errors import ContractError, DimensionError

RECON_MODES = ("masked", "full")


def weighted_squared_error(pred: Tensor, target: np.ndarray, weights: np.ndarray) -> Tensor:
    """Σ w·(pred − target)² / Σ w over entries with weight 1."""
    target = np.asarray(target, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    if pred.shape != target.shape or weights.shape != target.shape:
        raise DimensionError("prediction, target and weights must share a shape", pred.shape, target.shape, weights.shape)
    count = float(weights.sum())
    if count <= 0:
        raise ContractError("loss support is empty")
    residual = sub(pred, Tensor(target))
    return mul(sum_all(mul(mul(residual, residual), Tensor(weights))), 1.0 / count)


def mask_weights(shape: Tuple[int, ...], starts, mask_length: int, mode: str = "masked") -> np.ndarray:
    """
    Loss support for [T×D] or [B×T×D] reconstructions.

    `starts` is one start index per sequence; masked mode keeps rows
    [start, start + mask_length), full mode keeps everything.
    """
    if mode not in RECON_MODES:
        raise ContractError(f"recon_loss must be one of {RECON_MODES}, got {mode!r}")
    if mode == "full":
        return np.ones(shape)

    batched = len(shape) == 3
    starts = np.atleast_1d(np.asarray(starts, dtype=np.int64))
    steps = shape[1] if batched else shape[0]
    weights = np.zeros(shape if batched else (1,) + tuple(shape))
    for b, start in enumerate(starts):
        if mask_length < 1 or start < 0 or start + mask_length > steps:
            raise ContractError(f"mask range [{start}, {start + mask_length}) outside [0, {steps})")
        weights[b, start:start + mask_length, :] = 1.0
    return weights if batched else weights[0]


def masked_reconstruction_loss(
    pred: Tensor,
    original: np.ndarray,
    mask_range: Tuple[int, int],
) -> Tensor:
    """Mean squared error over the rows of `mask_range` only (all feature columns)."""
    start, stop = int(mask_range[0]), int(mask_range[1])
    if stop <= start:
        raise ContractError(f"empty mask range [{start}, {stop})")
    weights = mask_weights(pred.shape, [start], stop - start, mode="masked")
    return weighted_squared_error(pred, original, weights)


def full_reconstruction_loss(pred: Tensor, original: np.ndarray) -> Tensor:
    """Mean squared error over every entry."""
    return weighted_squared_error(pred, original, np.ones(pred.shape))


def label_loss(pred: Tensor, label: np.ndarray) -> Tensor:
    """Mean squared error between predicted and true intensities ([6] or [B×6])."""
    label = np.asarray(label, dtype=np.float64)
    if pred.shape != label.shape:
        raise DimensionError("prediction and label must share a shape", pred.shape, label.shape)
    return weighted_squared_error(pred, label, np.ones(label.shape))
