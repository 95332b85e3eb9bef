"""
Declarative architecture descriptions and their shape inference.

A ModelSpec is an ordered list of layer descriptors. Shapes exclude the
batch axis: images are (C, H, W), flat activations are (F,).
"""
import math
from typing import Annotated, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, Field, ValidationError, model_validator

from ..utils.errors import ConfigError, ShapeChainError

Shape = Tuple[int, ...]


class InputSpec(BaseModel):
    kind: Literal["input"] = "input"
    shape: Tuple[int, ...]

    def describe(self) -> str:
        return "input " + "x".join(str(d) for d in self.shape)


class ConvSpec(BaseModel):
    kind: Literal["conv"] = "conv"
    maps: int = Field(gt=0)
    kernel: Tuple[int, int]
    init_range: Optional[float] = Field(default=None, gt=0)
    max_norm: Optional[float] = Field(default=None, gt=0)

    def describe(self) -> str:
        return f"conv {self.maps} {self.kernel[0]}x{self.kernel[1]}"


class MaxPoolSpec(BaseModel):
    kind: Literal["maxpool"] = "maxpool"
    region: Tuple[int, int]
    stride: int = Field(gt=0)

    def describe(self) -> str:
        return f"maxpool {self.region[0]}x{self.region[1]}/{self.stride}"


class ActivationSpec(BaseModel):
    kind: Literal["activation"] = "activation"
    fn: Literal["relu", "tanh", "sigmoid"]

    def describe(self) -> str:
        return self.fn


class MaxoutSpec(BaseModel):
    kind: Literal["maxout"] = "maxout"
    pieces: int = Field(gt=0)

    def describe(self) -> str:
        return f"maxout k={self.pieces}"


class DropoutSpec(BaseModel):
    kind: Literal["dropout"] = "dropout"
    p_retain: float = Field(gt=0, le=1)

    def describe(self) -> str:
        return f"dropout p={self.p_retain:g}"


class DenseSpec(BaseModel):
    kind: Literal["dense"] = "dense"
    units: int = Field(gt=0)
    init_range: Optional[float] = Field(default=None, gt=0)
    max_norm: Optional[float] = Field(default=None, gt=0)

    def describe(self) -> str:
        return f"dense {self.units}"


class SoftmaxSpec(BaseModel):
    kind: Literal["softmax"] = "softmax"
    classes: int = Field(default=10, gt=0)

    def describe(self) -> str:
        return f"softmax {self.classes}"


LayerSpec = Annotated[
    Union[InputSpec, ConvSpec, MaxPoolSpec, ActivationSpec, MaxoutSpec,
          DropoutSpec, DenseSpec, SoftmaxSpec],
    Field(discriminator="kind"),
]

PARAMETRIC_KINDS = ("conv", "dense")


class ModelSpec(BaseModel):
    name: str = "custom"
    layers: List[LayerSpec]

    @model_validator(mode="after")
    def _input_and_output(self) -> "ModelSpec":
        if not self.layers or self.layers[0].kind != "input":
            raise ValueError("the first layer must be an input layer")
        if any(layer.kind == "input" for layer in self.layers[1:]):
            raise ValueError("only the first layer may be an input layer")
        softmaxes = [i for i, layer in enumerate(self.layers)
                     if layer.kind == "softmax"]
        if len(softmaxes) != 1:
            raise ValueError("exactly one softmax output layer is required")
        if softmaxes[0] != len(self.layers) - 1:
            raise ValueError("the softmax output must be the last layer")
        return self

    @property
    def input_shape(self) -> Shape:
        return tuple(self.layers[0].shape)

    @property
    def classes(self) -> int:
        return self.layers[-1].classes

    def parametric(self) -> List[int]:
        return [i for i, layer in enumerate(self.layers)
                if layer.kind in PARAMETRIC_KINDS]


def model_from_layers(name: str, layers: list) -> ModelSpec:
    try:
        return ModelSpec(name=name, layers=layers)
    except ValidationError as e:
        raise ConfigError(f"invalid model spec: {e}", model=name) from e


def infer_shapes(spec: ModelSpec,
                 input_shape: Optional[Shape] = None) -> List[Shape]:
    """Output shape of every layer, the input layer included.

    ``input_shape`` replaces the input layer's own shape when given.
    """
    shape = tuple(input_shape) if input_shape is not None else spec.input_shape
    if any(d <= 0 for d in shape):
        raise ShapeChainError("input dimensions must be positive", 0,
                              shape=shape)
    chain = [shape]
    for index, layer in enumerate(spec.layers[1:], start=1):
        shape = _next_shape(index, layer, shape)
        chain.append(shape)
    return chain


def _spatial(index: int, layer, shape: Shape) -> Shape:
    if len(shape) != 3:
        raise ShapeChainError(f"{layer.kind} needs a (C, H, W) input", index,
                              shape=shape)
    return shape


def _next_shape(index: int, layer, shape: Shape) -> Shape:
    if layer.kind == "conv":
        c, h, w = _spatial(index, layer, shape)
        kh, kw = layer.kernel
        ho, wo = h - kh + 1, w - kw + 1
        if ho <= 0 or wo <= 0:
            raise ShapeChainError("kernel larger than its input", index,
                                  kernel=layer.kernel, input=(h, w))
        return (layer.maps, ho, wo)
    if layer.kind == "maxpool":
        c, h, w = _spatial(index, layer, shape)
        rh, rw = layer.region
        if rh > h or rw > w or rh <= 0 or rw <= 0:
            raise ShapeChainError("pooling region exceeds its input", index,
                                  region=layer.region, input=(h, w))
        return (c, (h - rh) // layer.stride + 1, (w - rw) // layer.stride + 1)
    if layer.kind == "maxout":
        if shape[0] % layer.pieces != 0:
            raise ShapeChainError("features not divisible by maxout pieces",
                                  index, features=shape[0],
                                  pieces=layer.pieces)
        return (shape[0] // layer.pieces,) + shape[1:]
    if layer.kind == "dense":
        return (layer.units,)
    if layer.kind == "softmax":
        features = math.prod(shape)
        if features != layer.classes:
            raise ShapeChainError("softmax input must have one feature per "
                                  "class", index, features=features,
                                  classes=layer.classes)
        return (layer.classes,)
    return shape


def param_shapes(spec: ModelSpec) -> List[Tuple[Shape, Shape]]:
    chain = infer_shapes(spec)
    shapes = []
    for index in spec.parametric():
        layer, fan_in = spec.layers[index], chain[index - 1]
        if layer.kind == "conv":
            shapes.append(((layer.maps, fan_in[0]) + tuple(layer.kernel),
                           (layer.maps,)))
        else:
            shapes.append(((math.prod(fan_in), layer.units), (layer.units,)))
    return shapes


def parameter_count(spec: ModelSpec) -> int:
    return sum(math.prod(w) + math.prod(b) for w, b in param_shapes(spec))
