"""
Tests for layers, losses, model assemblies and the gradient-check suite.
"""
import numpy as np
import pytest

from src.autodiff import Tensor
from src.errors import ContractError, DimensionError
from src.nn import (
    DenseLayer,
    GRULayer,
    ModelKind,
    build_baseline_model,
    build_finetune_model,
    build_pretrain_model,
    forward_sequence,
    freeze_backbone,
    full_reconstruction_loss,
    gru_cell_step,
    label_loss,
    mask_weights,
    masked_reconstruction_loss,
    predict_label,
)
from src.nn.diagnostics import DEFAULT_TOLERANCE, MODEL_COORDINATES, all_cases, check_case


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


@pytest.fixture
def rng():
    return np.random.default_rng(5)


class TestGRULayer:
    def test_step_matches_reference(self, rng):
        """One step reproduces the update-gate equations."""
        layer = GRULayer("gru", 4, 3, rng)
        for b in (layer.b_z, layer.b_r, layer.b_h):
            b.data = rng.normal(size=3)
        x = rng.normal(size=4)
        h = rng.normal(size=3)
        p = {n: getattr(layer, n).data for n in layer.param_names}

        z = _sigmoid(x @ p["W_z"] + h @ p["U_z"] + p["b_z"])
        r = _sigmoid(x @ p["W_r"] + h @ p["U_r"] + p["b_r"])
        cand = np.tanh(x @ p["W_h"] + (r * h) @ p["U_h"] + p["b_h"])
        expected = (1.0 - z) * h + z * cand

        np.testing.assert_allclose(gru_cell_step(x, h, layer).data, expected, rtol=1e-12)

    def test_batched_step_matches_rows(self, rng):
        """A [B×in] step equals B single steps."""
        layer = GRULayer("gru", 4, 3, rng)
        x = rng.normal(size=(5, 4))
        h = rng.normal(size=(5, 3))
        batched = gru_cell_step(x, h, layer).data
        for i in range(5):
            np.testing.assert_allclose(batched[i], gru_cell_step(x[i], h[i], layer).data, rtol=1e-12)

    def test_input_width_checked(self, rng):
        layer = GRULayer("gru", 4, 3, rng)
        with pytest.raises(DimensionError):
            gru_cell_step(np.ones(5), np.zeros(3), layer)

    def test_initialization_bounds(self, rng):
        """Weights are uniform in ±1/√fan_in, biases start at zero."""
        layer = GRULayer("gru", 16, 9, rng)
        assert np.abs(layer.W_z.data).max() <= 1.0 / np.sqrt(16)
        assert np.abs(layer.U_h.data).max() <= 1.0 / np.sqrt(9)
        assert not layer.b_r.data.any()

    def test_parameter_counts(self):
        """Default layer sizes give the documented parameter counts."""
        assert GRULayer("g0", 74, 256).num_parameters() == 3 * (74 * 256 + 256 * 256 + 256)
        assert DenseLayer("features", 256, 74).num_parameters() == 256 * 74 + 74
        assert DenseLayer("head", 74, 6).num_parameters() == 450

    def test_freeze_toggles_gradient_tracking(self, rng):
        layer = DenseLayer("d", 3, 2, rng)
        layer.frozen = True
        assert not any(p.requires_grad for p in layer.parameters())
        layer.frozen = False
        assert all(p.requires_grad for p in layer.parameters())

    def test_set_parameters_copies_and_checks(self, rng):
        layer = DenseLayer("d", 3, 2)
        weight = rng.normal(size=(3, 2))
        layer.set_parameters([weight, np.ones(2)])
        weight[0, 0] = 99.0
        assert layer.weight.data[0, 0] != 99.0
        with pytest.raises(DimensionError):
            layer.set_parameters([np.ones((2, 3)), np.ones(2)])

    def test_zero_parameters_halve_hidden_state(self, rng):
        """All-zero weights give an update gate of 0.5 and a zero candidate."""
        layer = GRULayer("gru", 4, 3, rng=None)
        h = rng.normal(size=3)
        np.testing.assert_allclose(gru_cell_step(rng.normal(size=4), h, layer).data, 0.5 * h, rtol=1e-15)


class TestLosses:
    def test_masked_loss_ignores_unmasked_rows(self, rng):
        """Only rows inside the mask range contribute."""
        original = rng.normal(size=(10, 4))
        pred = original.copy()
        pred[:3] += 5.0
        pred[7:] -= 5.0
        pred[3:7] += 1.0
        loss = masked_reconstruction_loss(Tensor(pred), original, (3, 7))
        assert loss.item() == pytest.approx(1.0)

    def test_empty_mask_range_rejected(self, rng):
        with pytest.raises(ContractError):
            masked_reconstruction_loss(Tensor(np.zeros((5, 2))), np.zeros((5, 2)), (3, 3))

    def test_full_loss_is_mse(self):
        loss = full_reconstruction_loss(Tensor(np.full((2, 3), 2.0)), np.zeros((2, 3)))
        assert loss.item() == pytest.approx(4.0)

    def test_label_loss(self):
        loss = label_loss(Tensor([1.0, 2.0, 3.0, 0.0, 0.0, 0.0]), np.array([1.0, 2.0, 3.0, 0.0, 0.0, 3.0]))
        assert loss.item() == pytest.approx(9.0 / 6.0)

    def test_label_loss_shape_checked(self):
        with pytest.raises(DimensionError):
            label_loss(Tensor(np.zeros(6)), np.zeros(5))

    def test_mask_weights_batch(self):
        """One masked block per sequence of a batch."""
        weights = mask_weights((2, 6, 3), [0, 3], 3, "masked")
        assert weights[0, :3].all() and not weights[0, 3:].any()
        assert weights[1, 3:].all() and not weights[1, :3].any()
        assert mask_weights((2, 6, 3), [0, 3], 3, "full").all()

    def test_mask_weights_validation(self):
        with pytest.raises(ContractError):
            mask_weights((6, 3), [0], 3, "partial")
        with pytest.raises(ContractError):
            mask_weights((6, 3), [5], 3, "masked")


class TestModels:
    def test_pretrain_layout(self):
        """Default reconstructor: two GRU layers and a 74-wide dense layer."""
        model = build_pretrain_model(seed=None)
        assert model.kind == ModelKind.PRETRAIN
        assert [(l.in_dim, l.out_dim) for l in model.layers] == [(74, 256), (256, 256), (256, 74)]
        assert model.head is None

    def test_finetune_freezes_backbone(self):
        """Only the 450 head parameters are trainable after adoption."""
        model = build_finetune_model(build_pretrain_model(seed=None), seed=1)
        assert model.kind == ModelKind.FINETUNE
        assert model.frozen_flags == [True, True, True, False]
        assert model.num_trainable() == 450

    def test_finetune_copies_backbone(self, small_model_config):
        """Adoption copies pretrained parameters and leaves the source untouched."""
        pretrained = build_pretrain_model(small_model_config, seed=2)
        before = [a.tobytes() for a in pretrained.state_arrays()]
        tuned = build_finetune_model(pretrained, seed=3)
        for source, target in zip(pretrained.parameters(), tuned.parameters()):
            assert source.data.tobytes() == target.data.tobytes()
            assert source is not target
        assert [a.tobytes() for a in pretrained.state_arrays()] == before
        assert all(p.requires_grad for p in pretrained.parameters())

    def test_finetune_needs_pretrain_model(self, small_model_config):
        with pytest.raises(ContractError):
            build_finetune_model(build_baseline_model(small_model_config, seed=0))

    def test_baseline_all_trainable(self, small_model_config):
        model = build_baseline_model(small_model_config, seed=0)
        assert model.frozen_flags == [False] * 4
        assert model.num_trainable() == sum(p.size for p in model.parameters())

    def test_freeze_backbone_helper(self, small_model_config):
        model = freeze_backbone(build_baseline_model(small_model_config, seed=0))
        assert model.frozen_flags == [True, True, True, False]

    def test_same_seed_same_parameters(self, small_model_config):
        a = build_baseline_model(small_model_config, seed=7)
        b = build_baseline_model(small_model_config, seed=7)
        assert [x.tobytes() for x in a.state_arrays()] == [y.tobytes() for y in b.state_arrays()]

    def test_forward_sequence_shape(self, small_model_config, rng):
        model = build_pretrain_model(small_model_config, seed=0)
        out = forward_sequence(model, rng.normal(size=(9, 74)))
        assert out.shape == (9, 74)

    def test_outputs_are_causal(self, small_model_config, rng):
        """Outputs up to t depend only on inputs up to t."""
        model = build_pretrain_model(small_model_config, seed=3)
        x = rng.normal(size=(12, 74))
        full = forward_sequence(model, x).data
        for steps in (1, 5, 11):
            np.testing.assert_allclose(forward_sequence(model, x[:steps]).data, full[:steps], rtol=1e-12, atol=1e-14)

    @pytest.mark.parametrize("steps", [1, 6])
    def test_zero_parameters_output_feature_bias(self, small_model_config, rng, steps):
        """With zero weights the hidden state stays at 0, so every row is the feature-layer bias."""
        model = build_pretrain_model(small_model_config, seed=None)
        bias = rng.normal(size=74)
        model.layers[-1].bias.data = bias.copy()
        out = forward_sequence(model, rng.normal(size=(steps, 74))).data
        np.testing.assert_array_equal(out, np.tile(bias, (steps, 1)))

    def test_empty_sequence_rejected(self, small_model_config):
        model = build_pretrain_model(small_model_config, seed=0)
        with pytest.raises(ContractError):
            forward_sequence(model, np.zeros((0, 74)))

    def test_feature_width_checked(self, small_model_config):
        model = build_pretrain_model(small_model_config, seed=0)
        with pytest.raises(DimensionError):
            forward_sequence(model, np.zeros((4, 73)))

    def test_predict_label_shape(self, small_model_config, rng):
        model = build_baseline_model(small_model_config, seed=0)
        assert predict_label(model, rng.normal(size=(6, 74))).shape == (6,)

    def test_pretrain_model_cannot_predict(self, small_model_config, rng):
        model = build_pretrain_model(small_model_config, seed=0)
        with pytest.raises(ContractError):
            predict_label(model, rng.normal(size=(6, 74)))

    def test_batched_prediction_matches_single(self, small_model_config, rng):
        """Batching sequences of one length does not change predictions."""
        model = build_baseline_model(small_model_config, seed=0)
        batch = rng.normal(size=(3, 7, 74))
        batched = model.predict_batch(batch).data
        for i in range(3):
            np.testing.assert_allclose(batched[i], predict_label(model, batch[i]), rtol=1e-10, atol=1e-12)

    def test_mean_pooling_equals_mean_of_outputs(self, small_model_config, rng):
        """Mean pooling equals averaging the per-timestep backbone outputs."""
        model = build_baseline_model(small_model_config, seed=0, pooling="mean")
        batch = rng.normal(size=(2, 5, 74))
        outputs = np.stack([o.data for o in model.backbone_outputs(batch)], axis=1)
        np.testing.assert_allclose(model.pooled_features(batch).data, outputs.mean(axis=1), rtol=1e-10, atol=1e-12)

    def test_last_pooling_uses_final_timestep(self, small_model_config, rng):
        model = build_baseline_model(small_model_config, seed=0, pooling="last")
        batch = rng.normal(size=(2, 5, 74))
        np.testing.assert_array_equal(model.pooled_features(batch).data, model.backbone_outputs(batch)[-1].data)


class TestGradientChecks:
    """Analytic gradients of the full assemblies against central differences."""

    def test_gru_cell(self):
        result = check_case("gru_cell", all_cases()["gru_cell"], seed=0, trials=20)
        assert result.passed, result

    def test_pretrain_masked_loss(self):
        result = check_case(
            "pretrain_masked_loss",
            all_cases()["pretrain_masked_loss"],
            seed=0,
            trials=20,
            coordinates=MODEL_COORDINATES,
        )
        assert result.passed, result

    def test_finetune_head_loss(self):
        result = check_case("finetune_head_loss", all_cases()["finetune_head_loss"], seed=0, trials=20)
        assert result.passed, result

    @pytest.mark.slow
    @pytest.mark.parametrize("name", ["pretrain_full_loss", "baseline_label_loss"])
    def test_other_model_losses(self, name):
        result = check_case(name, all_cases()[name], seed=1, trials=10, coordinates=MODEL_COORDINATES)
        assert result.passed, result

    def test_tolerance_reported(self):
        result = check_case("gru_cell", all_cases()["gru_cell"], seed=3, trials=1)
        assert result.tolerance == DEFAULT_TOLERANCE
        assert 0.0 <= result.max_relative_error < DEFAULT_TOLERANCE
