"""
Tests for the binary checkpoint format.
"""
import struct

import numpy as np
import pytest

from src.errors import FormatError
from src.nn import (
    FORMAT_VERSION,
    MAGIC,
    ModelKind,
    build_baseline_model,
    build_finetune_model,
    build_pretrain_model,
    load_checkpoint,
    save_checkpoint,
)
from src.nn.checkpoint import decode_checkpoint, encode_checkpoint


def _same_parameters(a, b):
    return [x.tobytes() for x in a.state_arrays()] == [y.tobytes() for y in b.state_arrays()]


class TestRoundTrip:
    @pytest.mark.parametrize("builder", ["pretrain", "finetune", "baseline"])
    def test_kind_flags_and_bytes_preserved(self, tmp_path, small_model_config, builder):
        pretrained = build_pretrain_model(small_model_config, seed=4)
        model = {
            "pretrain": lambda: pretrained,
            "finetune": lambda: build_finetune_model(pretrained, seed=5),
            "baseline": lambda: build_baseline_model(small_model_config, seed=6),
        }[builder]()

        loaded = load_checkpoint(save_checkpoint(model, tmp_path / "model.msq"))

        assert loaded.kind == model.kind
        assert loaded.frozen_flags == model.frozen_flags
        assert loaded.config == model.config
        assert _same_parameters(loaded, model)

    def test_frozen_layers_do_not_track_gradients(self, small_model_config):
        model = build_finetune_model(build_pretrain_model(small_model_config, seed=0), seed=1)
        loaded = decode_checkpoint(encode_checkpoint(model))
        assert loaded.kind == ModelKind.FINETUNE
        assert loaded.num_trainable() == model.num_trainable()

    def test_pooling_applied_on_load(self, tmp_path, small_model_config):
        path = save_checkpoint(build_baseline_model(small_model_config, seed=0), tmp_path / "b.msq")
        assert load_checkpoint(path, pooling="mean").pooling == "mean"

    def test_parent_directories_created(self, tmp_path, small_model_config):
        path = save_checkpoint(build_pretrain_model(small_model_config), tmp_path / "a" / "b" / "m.msq")
        assert path.is_file()

    def test_header_layout(self, small_model_config):
        """Magic, version and layer count lead the payload."""
        payload = encode_checkpoint(build_pretrain_model(small_model_config))
        magic, version, count = struct.unpack_from("<4sII", payload)
        assert (magic, version, count) == (MAGIC, FORMAT_VERSION, 3)

    def test_parameters_stored_as_float64(self, small_model_config):
        model = build_pretrain_model(small_model_config, seed=1)
        payload = encode_checkpoint(model)
        first_layer = payload[12 + 10:]
        w_z = np.frombuffer(first_layer[: 74 * 8 * 8], dtype="<f8").reshape(74, 8)
        np.testing.assert_array_equal(w_z, model.layers[0].W_z.data)


class TestCorruption:
    @pytest.fixture
    def payload(self, small_model_config):
        return encode_checkpoint(build_baseline_model(small_model_config, seed=2))

    def test_bad_magic(self, payload):
        with pytest.raises(FormatError, match="magic"):
            decode_checkpoint(b"XXXX" + payload[4:])

    def test_unsupported_version(self, payload):
        bumped = payload[:4] + struct.pack("<I", FORMAT_VERSION + 1) + payload[8:]
        with pytest.raises(FormatError, match="version") as exc:
            decode_checkpoint(bumped)
        assert exc.value.found == FORMAT_VERSION + 1

    def test_truncated(self, payload):
        with pytest.raises(FormatError, match="truncated"):
            decode_checkpoint(payload[:-5])

    def test_truncated_header(self):
        with pytest.raises(FormatError):
            decode_checkpoint(MAGIC)

    def test_trailing_bytes(self, payload):
        with pytest.raises(FormatError, match="trailing"):
            decode_checkpoint(payload + b"\x00")

    def test_unknown_layer_kind(self, payload):
        corrupted = payload[:12] + b"\x07" + payload[13:]
        with pytest.raises(FormatError, match="layer kind"):
            decode_checkpoint(corrupted)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FormatError, match="not found"):
            load_checkpoint(tmp_path / "absent.msq")
