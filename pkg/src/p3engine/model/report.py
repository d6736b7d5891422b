"""Training run report shared by both model families."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class TrainReport:
    train_losses: list[float] = field(default_factory=list)
    val_losses: list[float] = field(default_factory=list)
    epochs: int = 0
    wall_clock_s: float = 0.0
    train_auc: float | None = None
    val_auc: float | None = None

    def to_json(self) -> dict:
        return {
            "train_losses": self.train_losses,
            "val_losses": self.val_losses,
            "epochs": self.epochs,
            "wall_clock_s": self.wall_clock_s,
            "train_auc": self.train_auc,
            "val_auc": self.val_auc,
        }
