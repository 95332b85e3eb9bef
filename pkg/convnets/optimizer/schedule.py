"""
Epoch-indexed learning-rate and momentum schedules.

Both are piecewise linear: they move linearly from their start value at
epoch 0 to their end value at the saturation epoch and hold afterwards.
The values are constant within an epoch.
"""
import math
from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

MAX_NORM_DEFAULT = math.sqrt(15.0) / 4.0
FIRST_LAYER_MAX_NORM_DEFAULT = 0.9

MomentumKind = Literal["classical", "nesterov"]


class TrainSchedule(BaseModel):
    """Every optimizer hyperparameter, with the defaults used for all
    regularized models."""

    base_lr: float = Field(default=0.17, gt=0)
    lr_floor_factor: float = Field(default=0.01, gt=0, le=1)
    lr_saturate_epoch: int = Field(default=500, ge=0)
    momentum_kind: MomentumKind = "nesterov"
    momentum_start: float = Field(default=0.5, ge=0, le=1)
    momentum_end: float = Field(default=0.6, ge=0, le=1)
    momentum_saturate_epoch: int = Field(default=250, ge=0)
    conv_grad_scale: float = Field(default=0.05, gt=0)
    batch_size: int = Field(default=100, gt=0)
    max_norm: Optional[float] = Field(default=MAX_NORM_DEFAULT, gt=0)
    first_layer_max_norm: Optional[float] = Field(
        default=FIRST_LAYER_MAX_NORM_DEFAULT, gt=0)
    max_epochs: Optional[int] = Field(default=None, gt=0)
    early_stop_window: Optional[int] = Field(default=20, gt=1)

    @model_validator(mode="after")
    def _momentum_non_decreasing(self) -> "TrainSchedule":
        if self.momentum_end < self.momentum_start:
            raise ValueError("momentum_end must be >= momentum_start")
        return self


def _ramp(start: float, end: float, saturate: int, epoch: int) -> float:
    if saturate == 0:
        return end
    t = min(epoch, saturate) / saturate
    return start + (end - start) * t


def lr_at(schedule: TrainSchedule, epoch: int) -> float:
    if epoch < 0:
        raise ValueError("epoch must be non-negative")
    floor = schedule.base_lr * schedule.lr_floor_factor
    return _ramp(schedule.base_lr, floor, schedule.lr_saturate_epoch, epoch)


def momentum_at(schedule: TrainSchedule, epoch: int) -> float:
    if epoch < 0:
        raise ValueError("epoch must be non-negative")
    return _ramp(schedule.momentum_start, schedule.momentum_end,
                 schedule.momentum_saturate_epoch, epoch)


def baseline_schedule() -> TrainSchedule:
    """Plain MLP run: classical momentum 0.9, lr 0.12, 30 epochs."""
    return TrainSchedule(
        base_lr=0.12, lr_floor_factor=1.0, momentum_kind="classical",
        momentum_start=0.9, momentum_end=0.9, max_norm=None,
        first_layer_max_norm=None, conv_grad_scale=1.0, max_epochs=30,
        early_stop_window=None)


def initial_cnn_schedule() -> TrainSchedule:
    """First CNN run: no momentum, lr 1, 30 epochs."""
    return TrainSchedule(
        base_lr=1.0, lr_floor_factor=1.0, momentum_kind="classical",
        momentum_start=0.0, momentum_end=0.0, max_norm=None,
        first_layer_max_norm=None, conv_grad_scale=1.0, max_epochs=30,
        early_stop_window=None)


SCHEDULE_PRESETS = {
    "default": TrainSchedule,
    "baseline": baseline_schedule,
    "initial_cnn": initial_cnn_schedule,
}
