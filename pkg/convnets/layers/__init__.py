from .base import Layer, LayerParams, LayerGrads
from .dense import Dense, dense_forward, dense_backward
from .conv import Conv2D, conv_forward, conv_backward
from .pooling import MaxPool2D, maxpool_forward, maxpool_backward
from .activations import Activation, ACTIVATIONS
from .activations import activation_forward, activation_backward
from .maxout import Maxout, maxout_forward, maxout_backward
from .dropout import Dropout, dropout_train, dropout_infer, dropout_backward
from .softmax import softmax
