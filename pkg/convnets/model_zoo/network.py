"""
A ModelSpec instantiated with parameters: the forward/backward stack the
trainer and gradient checker drive.
"""
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..layers import (Activation, Conv2D, Dense, Dropout, Layer, LayerParams,
                      Maxout, MaxPool2D, softmax)
from ..objective import LossReport, cross_entropy
from ..optimizer import NormConstraint, TrainSchedule, project_maxnorm
from ..utils.errors import DimensionError
from .spec import ModelSpec, infer_shapes


@dataclass
class ParamGroup:
    layer_index: int
    kind: str
    lr_scale: float
    constraint: Optional[NormConstraint]


class Network:
    def __init__(self, spec: ModelSpec, params: Sequence[LayerParams],
                 dropout_seed: int = 0, kernel: str = "im2col",
                 dtype=np.float64) -> None:
        infer_shapes(spec)
        if len(params) != len(spec.parametric()):
            raise DimensionError("one LayerParams per conv/dense layer",
                                 expected=len(spec.parametric()),
                                 got=len(params))
        self.spec = spec
        self.dtype = np.dtype(dtype)
        n_dropout = sum(1 for layer in spec.layers if layer.kind == "dropout")
        streams = iter(np.random.SeedSequence(dropout_seed).spawn(n_dropout))
        supplied = iter(params)

        self.layers: List[Layer] = []
        for desc in spec.layers[1:-1]:
            if desc.kind == "conv":
                layer = Conv2D(self._cast(next(supplied)), kernel)
            elif desc.kind == "dense":
                layer = Dense(self._cast(next(supplied)))
            elif desc.kind == "maxpool":
                layer = MaxPool2D(desc.region, desc.stride)
            elif desc.kind == "activation":
                layer = Activation(desc.fn)
            elif desc.kind == "maxout":
                layer = Maxout(desc.pieces)
            else:
                layer = Dropout(desc.p_retain,
                                np.random.default_rng(next(streams)))
            self.layers.append(layer)
        self._in_shape: Optional[Tuple[int, ...]] = None
        self._logit_shape: Optional[Tuple[int, ...]] = None

    def _cast(self, params: LayerParams) -> LayerParams:
        return LayerParams(params.weights.astype(self.dtype, copy=True),
                           params.biases.astype(self.dtype, copy=True))

    # Forward / backward

    def _prepare(self, x: np.ndarray) -> np.ndarray:
        shape = self.spec.input_shape
        if math.prod(x.shape[1:]) != math.prod(shape):
            raise DimensionError("input does not match the model input",
                                 input=tuple(x.shape[1:]), expected=shape)
        self._in_shape = x.shape
        return x.reshape((x.shape[0],) + shape).astype(self.dtype, copy=False)

    def logits(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        h = self._prepare(x)
        for layer in self.layers:
            h = layer.forward(h, train)
        self._logit_shape = h.shape
        return h.reshape(h.shape[0], -1)

    def forward(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        return softmax(self.logits(x, train))

    def backward(self, d_logits: np.ndarray) -> np.ndarray:
        """Backpropagate from the logits; returns the input gradient and
        leaves parameter gradients on the layers."""
        d = d_logits.reshape(self._logit_shape)
        for layer in reversed(self.layers):
            d = layer.backward(d)
        return d.reshape(self._in_shape)

    def predict(self, x: np.ndarray, batch_size: int = 500) -> np.ndarray:
        if x.shape[0] == 0:
            return np.zeros((0, self.spec.classes), dtype=self.dtype)
        return np.concatenate([self.forward(x[i:i + batch_size])
                               for i in range(0, x.shape[0], batch_size)])

    def evaluate(self, x: np.ndarray, labels: np.ndarray,
                 batch_size: int = 500) -> LossReport:
        return cross_entropy(self.predict(x, batch_size), labels)

    # Parameters

    @property
    def parametric_layers(self) -> List[Layer]:
        return [layer for layer in self.layers if layer.has_params]

    def parameters(self) -> List[np.ndarray]:
        """Weights and biases of every parametric layer, flattened in
        network order: [W0, b0, W1, b1, ...]."""
        return [a for layer in self.parametric_layers
                for a in layer.params.arrays()]

    def set_parameters(self, arrays: Sequence[np.ndarray]) -> None:
        layers = self.parametric_layers
        if len(arrays) != 2 * len(layers):
            raise DimensionError("wrong number of parameter tensors",
                                 expected=2 * len(layers), got=len(arrays))
        for i, layer in enumerate(layers):
            w, b = arrays[2 * i], arrays[2 * i + 1]
            if w.shape != layer.params.weights.shape \
                    or b.shape != layer.params.biases.shape:
                raise DimensionError("parameter shape mismatch", layer=i,
                                     weights=w.shape, biases=b.shape)
            layer.params = LayerParams(w, b)

    def layer_params(self) -> List[LayerParams]:
        return [layer.params.copy() for layer in self.parametric_layers]

    def gradients(self) -> List[np.ndarray]:
        return [g for layer in self.parametric_layers
                for g in (layer.grads.weights, layer.grads.biases)]

    def param_groups(self, schedule: TrainSchedule) -> List[ParamGroup]:
        """Learning-rate scale and norm cap of every parametric layer.

        Conv layers train at ``conv_grad_scale`` times the global rate.
        The first parametric layer is capped at ``first_layer_max_norm``,
        the rest at ``max_norm``; a layer's own ``max_norm`` wins.
        """
        groups = []
        for position, index in enumerate(self.spec.parametric()):
            desc = self.spec.layers[index]
            cap = schedule.max_norm
            if position == 0 and schedule.first_layer_max_norm is not None:
                cap = schedule.first_layer_max_norm
            if desc.max_norm is not None:
                cap = desc.max_norm
            is_conv = desc.kind == "conv"
            constraint = None if cap is None else NormConstraint(
                cap=cap, grouping="kernel" if is_conv else "column")
            groups.append(ParamGroup(
                layer_index=index, kind=desc.kind,
                lr_scale=schedule.conv_grad_scale if is_conv else 1.0,
                constraint=constraint))
        return groups

    def lr_scales(self, schedule: TrainSchedule) -> List[float]:
        """One scale per tensor of ``parameters()``; biases share their
        layer's scale."""
        return [g.lr_scale for g in self.param_groups(schedule)
                for _ in range(2)]

    def project(self, schedule: TrainSchedule) -> None:
        for group, layer in zip(self.param_groups(schedule),
                                self.parametric_layers):
            if group.constraint is None:
                continue
            layer.params = LayerParams(
                project_maxnorm(layer.params.weights, group.constraint),
                layer.params.biases)

    # Dropout streams and diagnostics

    @property
    def dropout_layers(self) -> List[Dropout]:
        return [layer for layer in self.layers if isinstance(layer, Dropout)]

    def rng_states(self) -> List[Dict[str, Any]]:
        return [layer.rng.bit_generator.state for layer in self.dropout_layers]

    def set_rng_states(self, states: Sequence[Dict[str, Any]]) -> None:
        for layer, state in zip(self.dropout_layers, states):
            layer.rng.bit_generator.state = state

    def freeze_dropout(self) -> None:
        for layer in self.dropout_layers:
            layer.freeze()

    def unfreeze_dropout(self) -> None:
        for layer in self.dropout_layers:
            layer.unfreeze()

    def kink_margin(self) -> float:
        return min((layer.kink_margin() for layer in self.layers),
                   default=float("inf"))

    def decisions(self) -> List[np.ndarray]:
        return [d for d in (layer.decisions() for layer in self.layers)
                if d is not None]

    def locate_nonfinite(self, x: np.ndarray) -> Optional[Tuple[int, str]]:
        """Spec index and kind of the first layer whose train-mode output
        is not finite, reusing the current dropout masks."""
        self.freeze_dropout()
        try:
            h = self._prepare(x)
            for index, layer in enumerate(self.layers, start=1):
                h = layer.forward(h, True)
                if not np.all(np.isfinite(h)):
                    return index, layer.kind
            return None
        finally:
            self.unfreeze_dropout()

