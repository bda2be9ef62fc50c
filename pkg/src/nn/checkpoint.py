"""
Versioned little-endian binary checkpoints.

Layout:
    magic "MSQ1" | version u32 | layer count u32
    per layer: kind u8 (0=GRU, 1=Dense) | in_dim u32 | out_dim u32 | frozen u8
               | parameter arrays as f64, in the layer's declared field order
"""
import struct
from pathlib import Path
from typing import List, Optional, Union

import numpy as np

from ..errors import FormatError
from ..utils.logging import get_logger
from .layers import DENSE_KIND, GRU_KIND, DenseLayer, GRULayer, Layer
from .models import ModelConfig, ModelKind, Pooling, SequenceModel

logger = get_logger("nn.checkpoint")

MAGIC = b"MSQ1"
FORMAT_VERSION = 1

_HEADER = struct.Struct("<4sII")
_LAYER = struct.Struct("<BIIB")
_F64 = np.dtype("<f8")


def encode_checkpoint(model: SequenceModel) -> bytes:
    chunks = [_HEADER.pack(MAGIC, FORMAT_VERSION, len(model.layers))]
    for layer in model.layers:
        chunks.append(_LAYER.pack(layer.kind, layer.in_dim, layer.out_dim, int(layer.frozen)))
        for param in layer.parameters():
            chunks.append(np.ascontiguousarray(param.data, dtype=_F64).tobytes())
    return b"".join(chunks)


def save_checkpoint(model: SequenceModel, path: Union[str, Path]) -> Path:
    """Write `model` to `path`; parent directories are created."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = encode_checkpoint(model)
    path.write_bytes(payload)
    logger.info("checkpoint_saved", path=str(path), kind=model.kind.value, bytes=len(payload))
    return path


class _Reader:
    def __init__(self, payload: bytes, source: str):
        self.payload = payload
        self.offset = 0
        self.source = source

    def take(self, size: int) -> bytes:
        end = self.offset + size
        if end > len(self.payload):
            raise FormatError(f"truncated checkpoint {self.source}", expected=end, found=len(self.payload))
        chunk = self.payload[self.offset:end]
        self.offset = end
        return chunk


def decode_checkpoint(payload: bytes, pooling: Pooling = "last", source: str = "<bytes>") -> SequenceModel:
    reader = _Reader(payload, source)
    magic, version, count = _HEADER.unpack(reader.take(_HEADER.size))
    if magic != MAGIC:
        raise FormatError(f"bad checkpoint magic in {source}", expected=MAGIC, found=magic)
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported checkpoint version in {source}", expected=FORMAT_VERSION, found=version)

    layers: List[Layer] = []
    gru_index = 0
    dense_index = 0
    for _ in range(count):
        kind, in_dim, out_dim, frozen = _LAYER.unpack(reader.take(_LAYER.size))
        if kind == GRU_KIND:
            layer: Layer = GRULayer(f"gru{gru_index}", in_dim, out_dim)
            gru_index += 1
        elif kind == DENSE_KIND:
            layer = DenseLayer("features" if dense_index == 0 else "head", in_dim, out_dim)
            dense_index += 1
        else:
            raise FormatError(f"unknown layer kind in {source}", expected=(GRU_KIND, DENSE_KIND), found=kind)

        arrays = []
        for shape in layer.expected_shapes():
            n = int(np.prod(shape))
            arrays.append(np.frombuffer(reader.take(n * _F64.itemsize), dtype=_F64).reshape(shape))
        layer.set_parameters(arrays)
        layer.frozen = bool(frozen)
        layers.append(layer)

    if reader.offset != len(payload):
        raise FormatError(f"trailing bytes in {source}", expected=reader.offset, found=len(payload))
    if gru_index == 0 or dense_index == 0:
        raise FormatError(f"checkpoint {source} has no backbone", expected="GRU stack + dense", found=count)

    config = ModelConfig(
        feature_dim=layers[0].in_dim,
        hidden_dim=layers[0].out_dim,
        num_gru_layers=gru_index,
        num_labels=layers[-1].out_dim if dense_index > 1 else 6,
    )
    if dense_index == 1:
        kind = ModelKind.PRETRAIN
    elif all(l.frozen for l in layers[:-1]):
        kind = ModelKind.FINETUNE
    else:
        kind = ModelKind.BASELINE
    return SequenceModel(kind, layers, config, pooling)


def load_checkpoint(path: Union[str, Path], pooling: Optional[Pooling] = "last") -> SequenceModel:
    """Read a checkpoint written by `save_checkpoint`."""
    path = Path(path)
    if not path.is_file():
        raise FormatError(f"checkpoint not found: {path}")
    model = decode_checkpoint(path.read_bytes(), pooling=pooling or "last", source=str(path))
    logger.info("checkpoint_loaded", path=str(path), kind=model.kind.value)
    return model
