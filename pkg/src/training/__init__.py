"""
Training procedures and their configuration.
"""
from .config import MaskSpec, ModelConfig, TrainConfig
from .trace import TrainingTrace
from .trainer import evaluate, finetune, length_batches, pooled_features, pretrain, train_baseline

__all__ = [
    "MaskSpec",
    "ModelConfig",
    "TrainConfig",
    "TrainingTrace",
    "evaluate",
    "finetune",
    "length_batches",
    "pooled_features",
    "pretrain",
    "train_baseline",
]
