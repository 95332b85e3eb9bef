from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field

from ..layers.base import LayerParams
from .spec import ModelSpec, param_shapes


class InitPolicy(BaseModel):
    """Symmetric uniform weight ranges; biases always start at 0."""

    conv_range: float = Field(default=0.5, gt=0)
    dense_range: float = Field(default=0.05, gt=0)
    seed: int = Field(default=0, ge=0)


def initialize(spec: ModelSpec, policy: InitPolicy = InitPolicy(),
               seed: Optional[int] = None,
               dtype=np.float64) -> List[LayerParams]:
    """Parameters for every conv/dense layer, in network order.

    ``seed`` overrides ``policy.seed``. A layer's own ``init_range``
    overrides the policy range.
    """
    rng = np.random.default_rng(policy.seed if seed is None else seed)
    params = []
    for index, (w_shape, b_shape) in zip(spec.parametric(),
                                         param_shapes(spec)):
        layer = spec.layers[index]
        default = policy.conv_range if layer.kind == "conv" \
            else policy.dense_range
        r = layer.init_range if layer.init_range is not None else default
        weights = rng.uniform(-r, r, size=w_shape).astype(dtype)
        params.append(LayerParams(weights, np.zeros(b_shape, dtype=dtype)))
    return params
