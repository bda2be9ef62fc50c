"""
Neural network package: GRU/dense layers, losses, model assemblies, checkpoints
"""
from .checkpoint import FORMAT_VERSION, MAGIC, load_checkpoint, save_checkpoint
from .layers import DenseLayer, GRULayer, gru_cell_step
from .losses import (
    full_reconstruction_loss,
    label_loss,
    mask_weights,
    masked_reconstruction_loss,
    weighted_squared_error,
)
from .models import (
    ModelConfig,
    ModelKind,
    SequenceModel,
    build_baseline_model,
    build_finetune_model,
    build_pretrain_model,
    forward_sequence,
    freeze_backbone,
    predict_label,
)

__all__ = [
    "GRULayer",
    "DenseLayer",
    "gru_cell_step",
    "ModelConfig",
    "ModelKind",
    "SequenceModel",
    "build_pretrain_model",
    "build_finetune_model",
    "build_baseline_model",
    "forward_sequence",
    "predict_label",
    "freeze_backbone",
    "masked_reconstruction_loss",
    "full_reconstruction_loss",
    "label_loss",
    "mask_weights",
    "weighted_squared_error",
    "save_checkpoint",
    "load_checkpoint",
    "MAGIC",
    "FORMAT_VERSION",
]
