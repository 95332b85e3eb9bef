from dataclasses import dataclass
from typing import List, Optional

import numpy as np


@dataclass
class LayerParams:
    """Weights and biases of one affine layer.

    Dense weights are [in, out]; convolution weights are
    [maps_out, maps_in, kH, kW] with one bias per output map.
    """

    weights: np.ndarray
    biases: np.ndarray

    def arrays(self) -> List[np.ndarray]:
        return [self.weights, self.biases]

    def copy(self) -> "LayerParams":
        return LayerParams(self.weights.copy(), self.biases.copy())


@dataclass
class LayerGrads:
    weights: Optional[np.ndarray]
    biases: Optional[np.ndarray]
    inputs: np.ndarray


class Layer:
    # the cache belongs to the most recent forward call only
    kind: str = "layer"
    params: Optional[LayerParams] = None
    grads: Optional[LayerGrads] = None

    def forward(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        raise NotImplementedError

    def backward(self, d_out: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def has_params(self) -> bool:
        return self.params is not None

    def kink_margin(self) -> float:
        """Distance of the cached forward pass from a non-differentiable
        point; infinite for smooth layers."""
        return float("inf")

    def decisions(self):
        return None
