"""
Training configuration.
"""
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

from ..data.dataset import MaskSpec
from ..nn.models import ModelConfig

ReconLoss = Literal["masked", "full"]
PoolingMode = Literal["last", "mean"]


class TrainConfig(BaseModel):
    """Hyperparameters shared by pretraining, fine-tuning and baseline training."""
    model_config = ConfigDict(extra="forbid")

    epochs: int = Field(30, gt=0, description="Fine-tune and baseline epochs")
    batch_size: int = Field(16, gt=0)
    learning_rate: float = Field(1e-3, gt=0.0)
    pretrain_epochs: int = Field(10, gt=0)
    seed: int = Field(0, ge=0)
    recon_loss: ReconLoss = Field("masked", description="Reconstruction support: masked rows or every row")
    pooling: PoolingMode = Field("last", description="How backbone outputs are pooled over time for the head")


__all__ = ["MaskSpec", "ModelConfig", "PoolingMode", "ReconLoss", "TrainConfig"]
