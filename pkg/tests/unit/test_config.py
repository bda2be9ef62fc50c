"""
Tests for run configuration files, seeding and timing utilities.
"""
from pathlib import Path

import pytest
import yaml

from src.cli.config import load_run_config, write_resolved_config
from src.cli.main import EXIT_DATA, EXIT_NUMERIC, EXIT_USAGE, exit_code_for
from src.errors import ConfigError, ContractError, FormatError, IngestionError, NumericError
from src.utils import TimerContext, derive_seed, make_rng

DEFAULT_CONFIG = Path(__file__).resolve().parents[2] / "config" / "default.yaml"


def test_defaults_without_file():
    """No config file means every documented default."""
    config = load_run_config(None)
    assert config.model.hidden_dim == 256
    assert config.mask.mask_length == 30
    assert config.mask.sentinel == -30.0
    assert len(config.sweep.budgets) == 18


def test_shipped_default_matches_builtin_defaults():
    assert load_run_config(DEFAULT_CONFIG) == load_run_config(None)


def test_unknown_nested_key_rejected(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text(yaml.safe_dump({"train": {"epoch": 3}}), encoding="utf-8")
    with pytest.raises(ConfigError, match="epoch"):
        load_run_config(path)


def test_invalid_yaml(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text("train: [unclosed", encoding="utf-8")
    with pytest.raises(ConfigError, match="YAML"):
        load_run_config(path)


def test_top_level_must_be_mapping(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text("- 1\n- 2\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="mapping"):
        load_run_config(path)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_run_config(tmp_path / "absent.yaml")


def test_seed_override_reaches_training(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text(yaml.safe_dump({"seed": 4}), encoding="utf-8")
    config = load_run_config(path)
    assert config.resolved().train.seed == 4
    assert config.resolved(9).seed == 9
    assert config.resolved(9).train.seed == 9


def test_sweep_section_validated():
    config = load_run_config(None)
    config.sweep.budgets = [50, 20]
    with pytest.raises(ConfigError, match="increasing"):
        config.sweep_config()


def test_resolved_config_round_trip(tmp_path):
    config = load_run_config(None).resolved(3)
    path = write_resolved_config(config, tmp_path)
    assert path.name == "config.yaml"
    assert load_run_config(path) == config


def test_exit_codes():
    assert exit_code_for(ConfigError("x")) == EXIT_USAGE
    assert exit_code_for(ContractError("x")) == EXIT_USAGE
    assert exit_code_for(IngestionError("x")) == EXIT_DATA
    assert exit_code_for(FormatError("x")) == EXIT_DATA
    assert exit_code_for(FileNotFoundError("x")) == EXIT_DATA
    assert exit_code_for(NumericError("x")) == EXIT_NUMERIC


def test_derived_seeds():
    """Pure function of its inputs; different keys give different streams."""
    assert derive_seed(0, 20, 1) == derive_seed(0, 20, 1)
    assert derive_seed(0, 20, 1) != derive_seed(0, 1, 20)
    assert derive_seed(0, 20, 1) != derive_seed(1, 20, 1)
    assert 0 <= derive_seed(7) < 2**63
    assert make_rng(3, 1).random() == make_rng(3, 1).random()


def test_timer_context():
    with TimerContext() as timer:
        sum(range(1000))
    assert timer.seconds >= 0.0
    assert timer.duration_ms == int(timer.seconds * 1000)
