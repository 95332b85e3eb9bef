from .spec import ModelSpec, LayerSpec, model_from_layers
from .spec import InputSpec, ConvSpec, MaxPoolSpec, ActivationSpec
from .spec import MaxoutSpec, DropoutSpec, DenseSpec, SoftmaxSpec
from .spec import infer_shapes, param_shapes, parameter_count
from .builtins import builtin, BUILTINS, VARIANTS
from .init import InitPolicy, initialize
from .network import Network, ParamGroup
