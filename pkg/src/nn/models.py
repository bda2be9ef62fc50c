"""
Model assemblies: the pretraining reconstructor, the fine-tune model with a
frozen backbone, and the randomly initialized baseline.

Layouts (default dimensions):
    pretrain:  GRU(74→256), GRU(256→256), Dense(256→74)
    finetune:  pretrain layers, all frozen, + Dense(74→6)
    baseline:  finetune layout, nothing frozen, nothing pretrained
"""
from enum import Enum
from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..autodiff import Tensor, add, mul, reshape, stack
from ..errors import ContractError, DimensionError
from .layers import DenseLayer, GRULayer, Layer


class ModelConfig(BaseModel):
    """Layer dimensions of every model assembly."""
    model_config = ConfigDict(extra="forbid")

    feature_dim: int = Field(74, ge=1, description="Acoustic parameters per timestep")
    hidden_dim: int = Field(256, ge=1, description="GRU units per layer")
    num_gru_layers: int = Field(2, ge=1)
    num_labels: int = Field(6, ge=1, description="Emotion intensities predicted by the head")


Pooling = Literal["last", "mean"]


class ModelKind(str, Enum):
    PRETRAIN = "pretrain"
    FINETUNE = "finetune"
    BASELINE = "baseline"


class SequenceModel:
    """
    Ordered GRU stack + dense layers with per-layer freeze flags.

    The backbone is the GRU stack followed by the feature-width dense layer;
    fine-tune and baseline models add a label head on top of it.
    """

    def __init__(self, kind: ModelKind, layers: List[Layer], config: ModelConfig, pooling: Pooling = "last"):
        if pooling not in ("last", "mean"):
            raise ContractError(f"pooling must be 'last' or 'mean', got {pooling!r}")
        self.kind = ModelKind(kind)
        self.layers = layers
        self.config = config
        self.pooling = pooling
        self._validate_layout()

    def _validate_layout(self) -> None:
        cfg = self.config
        n_gru = cfg.num_gru_layers
        expected = [(GRULayer, cfg.feature_dim, cfg.hidden_dim)]
        expected += [(GRULayer, cfg.hidden_dim, cfg.hidden_dim)] * (n_gru - 1)
        expected += [(DenseLayer, cfg.hidden_dim, cfg.feature_dim)]
        if self.kind != ModelKind.PRETRAIN:
            expected += [(DenseLayer, cfg.feature_dim, cfg.num_labels)]
        found = [(type(l), l.in_dim, l.out_dim) for l in self.layers]
        if found != expected:
            raise ContractError(f"{self.kind.value} layout mismatch: expected {expected}, found {found}")

    # -- structure ---------------------------------------------------------

    @property
    def gru_layers(self) -> List[GRULayer]:
        return [l for l in self.layers if isinstance(l, GRULayer)]

    @property
    def feature_layer(self) -> DenseLayer:
        return self.layers[self.config.num_gru_layers]

    @property
    def backbone(self) -> List[Layer]:
        return self.layers[: self.config.num_gru_layers + 1]

    @property
    def head(self) -> Optional[DenseLayer]:
        if self.kind == ModelKind.PRETRAIN:
            return None
        return self.layers[-1]

    @property
    def frozen_flags(self) -> List[bool]:
        return [l.frozen for l in self.layers]

    def named_parameters(self) -> List[Tuple[str, Tensor]]:
        return [item for layer in self.layers for item in layer.named_parameters()]

    def parameters(self, trainable_only: bool = False) -> List[Tensor]:
        params = [p for _, p in self.named_parameters()]
        if trainable_only:
            params = [p for p in params if p.requires_grad]
        return params

    def num_trainable(self) -> int:
        return sum(p.size for p in self.parameters(trainable_only=True))

    def state_arrays(self) -> List[np.ndarray]:
        """Copies of every parameter array in layer/declaration order."""
        return [p.data.copy() for p in self.parameters()]

    def describe(self) -> dict:
        return {
            "kind": self.kind.value,
            "pooling": self.pooling,
            "layers": [
                {"name": l.name, "type": type(l).__name__, "in": l.in_dim, "out": l.out_dim, "frozen": l.frozen}
                for l in self.layers
            ],
            "trainable_parameters": self.num_trainable(),
        }

    # -- forward -----------------------------------------------------------

    def _as_batch(self, batch) -> np.ndarray:
        batch = np.asarray(batch, dtype=np.float64)
        if batch.ndim == 2:
            batch = batch[None]
        if batch.ndim != 3:
            raise DimensionError("expected [T×D] or [B×T×D] input", batch.shape)
        if batch.shape[1] == 0:
            raise ContractError("empty input sequence (T = 0)")
        if batch.shape[2] != self.config.feature_dim:
            raise DimensionError("feature width", (self.config.feature_dim,), batch.shape[2:])
        return batch

    def hidden_states(self, batch) -> List[Tensor]:
        """Top GRU layer states per timestep, each [B×H]."""
        batch = self._as_batch(batch)
        states = [Tensor(batch[:, t, :]) for t in range(batch.shape[1])]
        for layer in self.gru_layers:
            states = layer.forward(states)
        return states

    def backbone_outputs(self, batch) -> List[Tensor]:
        """Feature-width outputs per timestep, each [B×F]."""
        dense = self.feature_layer
        return [dense(h) for h in self.hidden_states(batch)]

    def reconstruct(self, batch) -> Tensor:
        """Backbone outputs stacked to [B×T×F]."""
        return stack(self.backbone_outputs(batch), axis=1)

    def pooled_features(self, batch) -> Tensor:
        """Backbone output pooled over time, [B×F] (the head's input)."""
        states = self.hidden_states(batch)
        if self.pooling == "last":
            pooled = states[-1]
        else:
            # The feature layer is affine, so averaging its inputs equals averaging its outputs
            total = states[0]
            for h in states[1:]:
                total = add(total, h)
            pooled = mul(total, 1.0 / len(states))
        return self.feature_layer(pooled)

    def predict_batch(self, batch) -> Tensor:
        """Raw (unclamped) label predictions, [B×labels]."""
        head = self._require_head()
        return head(self.pooled_features(batch))

    def predict_from_features(self, features: np.ndarray) -> Tensor:
        """Head applied to precomputed pooled backbone features."""
        return self._require_head()(Tensor(features))

    def _require_head(self) -> DenseLayer:
        head = self.head
        if head is None:
            raise ContractError("the pretraining model has no label head")
        return head

    def __repr__(self) -> str:
        return f"SequenceModel(kind={self.kind.value}, layers={self.layers!r})"


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------

def _backbone_layers(config: ModelConfig, rng: Optional[np.random.Generator]) -> List[Layer]:
    layers: List[Layer] = []
    in_dim = config.feature_dim
    for i in range(config.num_gru_layers):
        layers.append(GRULayer(f"gru{i}", in_dim, config.hidden_dim, rng))
        in_dim = config.hidden_dim
    layers.append(DenseLayer("features", config.hidden_dim, config.feature_dim, rng))
    return layers


def build_pretrain_model(config: Optional[ModelConfig] = None, seed: Optional[int] = 0) -> SequenceModel:
    """Randomly initialized reconstructor (seed=None gives all-zero parameters)."""
    config = config or ModelConfig()
    rng = np.random.default_rng(seed) if seed is not None else None
    return SequenceModel(ModelKind.PRETRAIN, _backbone_layers(config, rng), config)


def build_baseline_model(
    config: Optional[ModelConfig] = None,
    seed: Optional[int] = 0,
    pooling: Pooling = "last",
) -> SequenceModel:
    """Fine-tune layout with every layer trainable and randomly initialized."""
    config = config or ModelConfig()
    rng = np.random.default_rng(seed) if seed is not None else None
    layers = _backbone_layers(config, rng)
    layers.append(DenseLayer("head", config.feature_dim, config.num_labels, rng))
    return SequenceModel(ModelKind.BASELINE, layers, config, pooling)


def build_finetune_model(
    pretrained: SequenceModel,
    seed: Optional[int] = 0,
    pooling: Pooling = "last",
) -> SequenceModel:
    """
    Adopt a pretrained backbone (copied, frozen) and add a fresh label head.

    The pretrained model is not modified.
    """
    if pretrained.kind != ModelKind.PRETRAIN:
        raise ContractError(f"expected a pretrain model, got {pretrained.kind.value}")
    config = pretrained.config
    layers = _backbone_layers(config, rng=None)
    for target, source in zip(layers, pretrained.layers):
        target.set_parameters([p.data for p in source.parameters()])
    rng = np.random.default_rng(seed) if seed is not None else None
    layers.append(DenseLayer("head", config.feature_dim, config.num_labels, rng))
    model = SequenceModel(ModelKind.FINETUNE, layers, config, pooling)
    return freeze_backbone(model)


def freeze_backbone(model: SequenceModel) -> SequenceModel:
    """Freeze every GRU layer and the feature dense layer; only the head stays trainable."""
    for layer in model.backbone:
        layer.frozen = True
    if model.head is not None:
        model.head.frozen = False
    return model


# ---------------------------------------------------------------------------
# Single-sequence operations
# ---------------------------------------------------------------------------

def forward_sequence(model: SequenceModel, seq) -> Tensor:
    """Per-timestep backbone outputs [T×F] for one [T×D] sequence."""
    seq = np.asarray(seq, dtype=np.float64)
    if seq.ndim != 2:
        raise DimensionError("expected a [T×D] sequence", seq.shape)
    batched = model.reconstruct(seq)
    return reshape(batched, batched.shape[1:])


def predict_label(model: SequenceModel, seq) -> np.ndarray:
    """Raw intensity prediction [labels] for one [T×D] sequence."""
    seq = np.asarray(seq, dtype=np.float64)
    if seq.ndim != 2:
        raise DimensionError("expected a [T×D] sequence", seq.shape)
    return model.predict_batch(seq).data[0].copy()
