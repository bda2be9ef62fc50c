"""
Run configuration file (YAML) shared by every command.

Unknown keys are rejected at every level. The top-level `seed` drives all
training randomness; `data.split_seed` fixes the train/validation split so
that separately run commands see the same split.
"""
from pathlib import Path
from typing import List, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..data.dataset import MaskSpec
from ..errors import ConfigError
from ..experiment.sweep import DEFAULT_BUDGETS, SweepConfig
from ..nn.models import ModelConfig
from ..training.config import TrainConfig

RESOLVED_CONFIG_NAME = "config.yaml"


class DataSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    split_ratio: float = Field(0.8, gt=0.0, lt=1.0, description="Training share of the train/validation split")
    split_seed: int = Field(0, ge=0)
    checkpoint: Optional[str] = Field(None, description="Pretrained checkpoint used by finetune and sweep")


class SweepSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    budgets: List[int] = Field(default_factory=lambda: list(DEFAULT_BUDGETS))
    repeats: int = Field(3, ge=1)
    max_workers: int = Field(1, ge=1)


class RunConfigFile(BaseModel):
    """Everything a command needs besides its flags."""
    model_config = ConfigDict(extra="forbid")

    seed: int = Field(0, ge=0)
    model: ModelConfig = Field(default_factory=ModelConfig)
    mask: MaskSpec = Field(default_factory=MaskSpec)
    train: TrainConfig = Field(default_factory=TrainConfig)
    sweep: SweepSection = Field(default_factory=SweepSection)
    data: DataSection = Field(default_factory=DataSection)
    output_dir: Optional[str] = None

    def resolved(self, seed: Optional[int] = None) -> "RunConfigFile":
        """Copy with an optional seed override applied and propagated to `train.seed`."""
        seed = self.seed if seed is None else seed
        return self.model_copy(update={"seed": seed, "train": self.train.model_copy(update={"seed": seed})})

    def sweep_config(self) -> SweepConfig:
        try:
            return SweepConfig(
                budgets=self.sweep.budgets,
                repeats=self.sweep.repeats,
                base_seed=self.seed,
                max_workers=self.sweep.max_workers,
                train=self.train,
            )
        except ValidationError as exc:
            raise ConfigError(f"invalid sweep section: {exc}") from exc


def load_run_config(path: Optional[Union[str, Path]] = None) -> RunConfigFile:
    """Parse a run configuration file; no path means all defaults."""
    if path is None:
        return RunConfigFile()
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"config file {path} is not valid YAML: {exc}") from exc
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError(f"config file {path} must hold a mapping at the top level")
    try:
        return RunConfigFile.model_validate(raw)
    except ValidationError as exc:
        raise ConfigError(f"invalid config file {path}: {exc}") from exc


def dump_run_config(config: RunConfigFile) -> str:
    return yaml.safe_dump(config.model_dump(mode="json"), sort_keys=False)


def write_resolved_config(config: RunConfigFile, path: Union[str, Path]) -> Path:
    """Write `config` as YAML; a directory path receives `config.yaml`."""
    path = Path(path)
    if path.is_dir():
        path = path / RESOLVED_CONFIG_NAME
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_run_config(config), encoding="utf-8")
    return path
