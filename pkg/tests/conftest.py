"""
Shared fixtures: small model dimensions and a small synthetic dataset.
"""
import pytest

from src.data import MaskSpec, SyntheticConfig, generate_synthetic, split_and_standardize
from src.nn.models import ModelConfig
from src.training import TrainConfig
from src.utils.logging import setup_logging


@pytest.fixture(autouse=True, scope="session")
def quiet_logging():
    """Route structured logs to a null handler during tests."""
    setup_logging(log_level="WARNING", console_output=False)


@pytest.fixture
def small_model_config():
    """Full 74-wide features, tiny recurrent state."""
    return ModelConfig(feature_dim=74, hidden_dim=8, num_gru_layers=2, num_labels=6)


@pytest.fixture
def small_mask():
    return MaskSpec(mask_length=5)


@pytest.fixture
def fast_train_config():
    return TrainConfig(epochs=4, batch_size=8, learning_rate=1e-2, pretrain_epochs=3, seed=0)


@pytest.fixture(scope="session")
def synthetic_dataset():
    """40 labeled samples with lengths 12..14."""
    return generate_synthetic(SyntheticConfig(num_samples=40, t_min=12, t_max=14, noise_scale=0.2, seed=3))


@pytest.fixture(scope="session")
def standardized_splits(synthetic_dataset):
    """(train, val) with training statistics applied to both parts."""
    train, val, _ = split_and_standardize(synthetic_dataset, ratio=0.8, seed=0)
    return train, val
