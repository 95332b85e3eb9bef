"""
Named architectures.

``baseline`` is the one-hidden-layer sigmoid MLP, ``initial_cnn`` the
two-convolution grayscale network, ``model1`` .. ``model4`` the ReLU
networks, and ``activation_study`` the network used to compare hidden
activations. Every builtin comes in three variants:

- ``plain``: activations only.
- ``dropout``: input dropout (retain 0.8) and dropout after every hidden
  dense layer (retain 0.5); ``conv_dropout`` also drops conv outputs.
- ``maxout``: the dropout variant with maxout in place of activations,
  2 pieces after convolutions and 5 after dense layers.
"""
import math
from typing import List, Optional, Tuple

from ..layers.activations import ACTIVATIONS
from ..utils.errors import ConfigError
from .spec import (ActivationSpec, ConvSpec, DenseSpec, DropoutSpec,
                   InputSpec, MaxoutSpec, MaxPoolSpec, ModelSpec, SoftmaxSpec,
                   infer_shapes, model_from_layers)

BUILTINS = ("baseline", "initial_cnn", "model1", "model2", "model3",
            "model4", "activation_study")
VARIANTS = ("plain", "dropout", "maxout")

INPUT_RETAIN = 0.8
HIDDEN_RETAIN = 0.5
CONV_PIECES = 2
DENSE_PIECES = 5

RGB_INPUT = (3, 32, 32)
GRAY_INPUT = (1, 32, 32)


class _Builder:
    def __init__(self, variant: str, activation: str, map_scale: float,
                 unit_scale: float, max_maps: Optional[int],
                 max_units: Optional[int], conv_dropout: bool) -> None:
        self.variant = variant
        self.activation = activation
        self.map_scale = map_scale
        self.unit_scale = unit_scale
        self.max_maps = max_maps
        self.max_units = max_units
        self.conv_dropout = conv_dropout
        self.layers: list = []

    @property
    def regularized(self) -> bool:
        return self.variant != "plain"

    def _scaled(self, n: int, scale: float, cap: Optional[int]) -> int:
        n = max(1, int(round(n * scale)))
        return min(n, cap) if cap is not None else n

    def input(self, shape: Tuple[int, ...]) -> "_Builder":
        self.layers.append(InputSpec(shape=shape))
        if self.regularized:
            self.layers.append(DropoutSpec(p_retain=INPUT_RETAIN))
        return self

    def conv(self, maps: int, kernel: int) -> "_Builder":
        maps = self._scaled(maps, self.map_scale, self.max_maps)
        if self.variant == "maxout":
            self.layers.append(ConvSpec(maps=maps * CONV_PIECES,
                                        kernel=(kernel, kernel)))
            self.layers.append(MaxoutSpec(pieces=CONV_PIECES))
        else:
            self.layers.append(ConvSpec(maps=maps, kernel=(kernel, kernel)))
            self.layers.append(ActivationSpec(fn=self.activation))
        if self.regularized and self.conv_dropout:
            self.layers.append(DropoutSpec(p_retain=HIDDEN_RETAIN))
        return self

    def pool(self, region: int, stride: int) -> "_Builder":
        self.layers.append(MaxPoolSpec(region=(region, region), stride=stride))
        return self

    def dense(self, units: int) -> "_Builder":
        units = self._scaled(units, self.unit_scale, self.max_units)
        if self.variant == "maxout":
            self.layers.append(DenseSpec(units=units * DENSE_PIECES))
            self.layers.append(MaxoutSpec(pieces=DENSE_PIECES))
        else:
            self.layers.append(DenseSpec(units=units))
            self.layers.append(ActivationSpec(fn=self.activation))
        if self.regularized:
            self.layers.append(DropoutSpec(p_retain=HIDDEN_RETAIN))
        return self

    def output(self, classes: int = 10) -> List:
        self.layers.append(DenseSpec(units=classes))
        self.layers.append(SoftmaxSpec(classes=classes))
        return self.layers


def _baseline(b: _Builder, shape) -> List:
    return b.input((math.prod(shape),)).dense(1000).output()


def _initial_cnn(b: _Builder, shape) -> List:
    return (b.input(shape).conv(6, 5).pool(2, 2).conv(12, 5).pool(2, 2)
            .dense(100).output())


def _model1(b: _Builder, shape) -> List:
    return (b.input(shape).conv(64, 5).pool(2, 2).conv(96, 5).pool(2, 2)
            .conv(160, 5).dense(1000).output())


def _model2(b: _Builder, shape) -> List:
    return (b.input(shape).conv(96, 5).pool(3, 2).conv(192, 5).pool(3, 2)
            .conv(192, 3).pool(2, 2).dense(500).output())


def _model3(b: _Builder, shape) -> List:
    return (b.input(shape).conv(64, 5).pool(2, 1).conv(64, 5).pool(3, 2)
            .conv(128, 5).pool(3, 2).dense(3072).dense(2048).output())


def _model4(b: _Builder, shape) -> List:
    return (b.input(shape).conv(32, 8).pool(2, 1).conv(48, 5).pool(2, 1)
            .conv(64, 3).conv(64, 3).conv(48, 3).pool(2, 1)
            .dense(500).dense(500).output())


def _activation_study(b: _Builder, shape) -> List:
    return (b.input(shape).conv(32, 5).pool(2, 2).conv(32, 3).conv(64, 3)
            .pool(2, 2).dense(500).dense(500).output())


_FACTORIES = {
    "baseline": (_baseline, RGB_INPUT, "sigmoid"),
    "initial_cnn": (_initial_cnn, GRAY_INPUT, "sigmoid"),
    "model1": (_model1, RGB_INPUT, "relu"),
    "model2": (_model2, RGB_INPUT, "relu"),
    "model3": (_model3, RGB_INPUT, "relu"),
    "model4": (_model4, RGB_INPUT, "relu"),
    "activation_study": (_activation_study, RGB_INPUT, "relu"),
}


def builtin(name: str, variant: str = "plain", *,
            activation: Optional[str] = None, map_scale: float = 1.0,
            unit_scale: float = 1.0, max_maps: Optional[int] = None,
            max_units: Optional[int] = None, conv_dropout: bool = False,
            input_shape: Optional[Tuple[int, ...]] = None) -> ModelSpec:
    """A shape-checked builtin architecture.

    The scale options shrink map and unit counts (never below 1) for
    desk-scale runs; ``input_shape`` replaces the default image shape.
    """
    if name not in _FACTORIES:
        raise ConfigError(f"unknown builtin model: {name}",
                          valid=", ".join(BUILTINS))
    if variant not in VARIANTS:
        raise ConfigError(f"unknown model variant: {variant}",
                          valid=", ".join(VARIANTS))
    if map_scale <= 0 or unit_scale <= 0:
        raise ConfigError("scale factors must be positive",
                          map_scale=map_scale, unit_scale=unit_scale)
    if activation is not None and activation not in ACTIVATIONS:
        raise ConfigError(f"unknown activation: {activation}",
                          valid=", ".join(ACTIVATIONS))
    factory, default_shape, default_activation = _FACTORIES[name]
    builder = _Builder(variant, activation or default_activation, map_scale,
                       unit_scale, max_maps, max_units, conv_dropout)
    shape = tuple(input_shape) if input_shape is not None else default_shape
    suffix = "" if variant == "plain" else f"-{variant}"
    spec = model_from_layers(name + suffix, factory(builder, shape))
    infer_shapes(spec)
    return spec
