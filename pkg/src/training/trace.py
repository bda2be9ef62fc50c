"""
Per-epoch training trace.
"""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Union

import pandas as pd


@dataclass
class TrainingTrace:
    """Mean loss and wall-clock seconds per epoch, plus the run's config and seed."""
    stage: str
    seed: int
    config: Dict[str, Any] = field(default_factory=dict)
    losses: List[float] = field(default_factory=list)
    seconds: List[float] = field(default_factory=list)
    epoch_orders: List[List[str]] = field(default_factory=list)

    @property
    def epochs(self) -> int:
        return len(self.losses)

    @property
    def final_loss(self) -> float:
        return self.losses[-1] if self.losses else float("nan")

    def record(self, loss: float, seconds: float, order: List[str]) -> None:
        self.losses.append(float(loss))
        self.seconds.append(float(seconds))
        self.epoch_orders.append(list(order))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "epoch": range(1, self.epochs + 1),
            "loss": self.losses,
            "seconds": self.seconds,
        })

    def to_csv(self, path: Union[str, Path]) -> Path:
        """Write `epoch,loss,seconds` rows."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(path, index=False)
        return path
