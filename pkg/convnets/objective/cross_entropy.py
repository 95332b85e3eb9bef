from typing import Sequence

import numpy as np
from pydantic import BaseModel, Field

from ..layers.softmax import softmax
from ..utils.errors import DataError, DimensionError, NumericError

PROBABILITY_FLOOR = 1e-12
NORMALIZATION_TOLERANCE = 1e-6


class LossReport(BaseModel):
    """Mean cross-entropy in nats per sample and the argmax error rate."""

    loss: float = Field(ge=0.0)
    error: float = Field(ge=0.0, le=1.0)
    count: int = Field(ge=0)

    @property
    def accuracy(self) -> float:
        return 1.0 - self.error

    def custom_output(self) -> dict:
        return {"loss": self.loss, "error": self.error,
                "accuracy": self.accuracy, "count": self.count}


def _check_targets(n: int, k: int, targets: np.ndarray) -> np.ndarray:
    targets = np.asarray(targets, dtype=np.int64)
    if targets.shape != (n,):
        raise DimensionError("one target per row expected",
                             rows=n, targets=targets.shape)
    if n and (targets.min() < 0 or targets.max() >= k):
        raise DataError("target label out of range", classes=k,
                        max_label=int(targets.max()))
    return targets


def sample_losses(probs: np.ndarray, targets: Sequence[int]) -> np.ndarray:
    """Per-sample -ln p[n, target_n] with the probability floor applied."""
    if probs.ndim != 2:
        raise DimensionError("probabilities must be [N, K]",
                             shape=tuple(probs.shape))
    n, k = probs.shape
    targets = _check_targets(n, k, targets)
    if not np.all(np.isfinite(probs)):
        raise NumericError("probabilities are not finite")
    if n and np.max(np.abs(probs.sum(axis=1) - 1.0)) > NORMALIZATION_TOLERANCE:
        raise NumericError("probability rows do not sum to 1")
    picked = probs[np.arange(n), targets]
    return -np.log(np.clip(picked, PROBABILITY_FLOOR, 1.0))


def misclassified(probs: np.ndarray, targets: Sequence[int]) -> np.ndarray:
    return np.argmax(probs, axis=1) != np.asarray(targets)


def report_from_samples(losses: np.ndarray, wrong: np.ndarray) -> LossReport:
    if losses.size == 0:
        return LossReport(loss=0.0, error=0.0, count=0)
    return LossReport(loss=float(np.mean(losses)),
                      error=float(np.mean(wrong)), count=int(losses.size))


def cross_entropy(probs: np.ndarray, targets: Sequence[int]) -> LossReport:
    losses = sample_losses(probs, targets)
    return report_from_samples(losses, misclassified(probs, targets))


def softmax_xent_backward(logits: np.ndarray,
                          targets: Sequence[int]) -> np.ndarray:
    n, k = logits.shape
    targets = _check_targets(n, k, targets)
    grad = softmax(logits)
    grad[np.arange(n), targets] -= 1.0
    return grad / max(n, 1)
