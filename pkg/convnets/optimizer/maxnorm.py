from typing import Literal

import numpy as np
from pydantic import BaseModel, Field

from ..utils.errors import DimensionError

Grouping = Literal["kernel", "column"]


class NormConstraint(BaseModel):
    """Cap ``c`` on the L2 norm of each weight group.

    ``kernel`` groups are whole conv kernels ``W[o]`` of shape
    [maps_in, kH, kW]; ``column`` groups are the weights incident on one
    dense output unit, ``W[:, o]``.
    """

    cap: float = Field(gt=0)
    grouping: Grouping

    def group_norms(self, weights: np.ndarray) -> np.ndarray:
        return np.sqrt(np.sum(weights * weights, axis=_axes(self, weights)))


def _axes(constraint: NormConstraint, weights: np.ndarray):
    if constraint.grouping == "kernel":
        if weights.ndim != 4:
            raise DimensionError("kernel grouping needs conv weights",
                                 shape=tuple(weights.shape))
        return (1, 2, 3)
    if weights.ndim != 2:
        raise DimensionError("column grouping needs dense weights",
                             shape=tuple(weights.shape))
    return (0,)


def project_maxnorm(weights: np.ndarray,
                    constraint: NormConstraint) -> np.ndarray:
    """Groups inside the ball come back unchanged bit for bit."""
    axes = _axes(constraint, weights)
    norms = np.sqrt(np.sum(weights * weights, axis=axes, keepdims=True))
    over = norms > constraint.cap
    if not np.any(over):
        return weights.copy()
    factor = np.where(over, constraint.cap / np.where(over, norms, 1.0), 1.0)
    return np.where(over, weights * factor, weights)
