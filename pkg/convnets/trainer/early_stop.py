from collections import deque
from typing import Deque, Iterable, Optional

EARLY_STOP_WINDOW = 20


class EarlyStopState:
    """The last ``window`` validation errors plus the best epoch seen.

    Training stops once the window is full and its oldest entry is
    strictly lower than every later one; ties keep training.
    """

    def __init__(self, window: int = EARLY_STOP_WINDOW,
                 errors: Iterable[float] = (),
                 best_error: Optional[float] = None,
                 best_epoch: Optional[int] = None) -> None:
        self.window = window
        self.errors: Deque[float] = deque(errors, maxlen=window)
        self.best_error = best_error
        self.best_epoch = best_epoch

    def push(self, error: float, epoch: int) -> bool:
        """Record one epoch; True when it is a new best."""
        self.errors.append(error)
        if self.best_error is None or error < self.best_error:
            self.best_error, self.best_epoch = error, epoch
            return True
        return False

    def should_stop(self) -> bool:
        return should_stop(self)

    def to_dict(self) -> dict:
        return {"window": self.window, "errors": list(self.errors),
                "best_error": self.best_error, "best_epoch": self.best_epoch}

    @classmethod
    def from_dict(cls, data: dict) -> "EarlyStopState":
        return cls(data["window"], data["errors"], data["best_error"],
                   data["best_epoch"])


def should_stop(state: EarlyStopState) -> bool:
    errors = list(state.errors)
    if state.window < 2 or len(errors) < state.window:
        return False
    return errors[0] < min(errors[1:])
