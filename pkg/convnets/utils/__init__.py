from .errors import ConvnetError, ConfigError, DimensionError
from .errors import ShapeChainError, DataError, NumericError
from .logging_utils import configure_logging
