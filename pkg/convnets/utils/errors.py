from typing import Any, Dict


class ConvnetError(Exception):
    """Base class for every error the library raises on purpose.

    The exit code is what ``main.py`` hands back to the shell.
    """

    exit_code: int = 1

    def __init__(self, message: str, **context: Any) -> None:
        super().__init__(message)
        self.message: str = message
        self.context: Dict[str, Any] = context

    def __str__(self) -> str:
        if not self.context:
            return self.message
        details = ", ".join(f"{k}={v}" for k, v in self.context.items())
        return f"{self.message} ({details})"


class ConfigError(ConvnetError):
    exit_code = 1


class DimensionError(ConfigError):
    pass


class ShapeChainError(ConfigError):
    def __init__(self, message: str, layer_index: int, **context: Any):
        super().__init__(message, layer=layer_index, **context)
        self.layer_index: int = layer_index


class DataError(ConvnetError):
    exit_code = 2


class NumericError(ConvnetError):
    exit_code = 3
