import csv
import io
from typing import List

from pydantic import BaseModel, Field, model_validator

from ..tensor_core import atomic_write_bytes
from ..utils.errors import DataError

CURVE_COLUMNS = ("epoch", "train_loss", "train_error", "val_loss",
                 "val_error", "lr", "momentum", "seconds")


class CurveRow(BaseModel):
    epoch: int = Field(ge=0)
    train_loss: float
    train_error: float = Field(ge=0.0, le=1.0)
    val_loss: float
    val_error: float = Field(ge=0.0, le=1.0)
    lr: float
    momentum: float
    seconds: float = Field(ge=0.0)


class LearningCurve(BaseModel):
    """Per-epoch training record, written as CSV in ``CURVE_COLUMNS``
    order."""

    rows: List[CurveRow] = []

    @model_validator(mode="after")
    def _epochs_increase(self) -> "LearningCurve":
        epochs = [row.epoch for row in self.rows]
        if any(b <= a for a, b in zip(epochs, epochs[1:])):
            raise ValueError("curve epochs must be strictly increasing")
        return self

    def append(self, row: CurveRow) -> None:
        if self.rows and row.epoch <= self.rows[-1].epoch:
            raise ValueError(f"epoch {row.epoch} does not follow "
                             f"{self.rows[-1].epoch}")
        self.rows.append(row)

    def __len__(self) -> int:
        return len(self.rows)

    def best_val_error(self) -> float:
        if not self.rows:
            raise ValueError("empty curve")
        return min(row.val_error for row in self.rows)

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(CURVE_COLUMNS)
        for row in self.rows:
            values = row.model_dump()
            writer.writerow([values["epoch"]] + [
                repr(float(values[c])) for c in CURVE_COLUMNS[1:]])
        return out.getvalue()

    def write(self, path: str) -> None:
        try:
            atomic_write_bytes(path, self.to_csv().encode("utf-8"))
        except OSError as e:
            raise DataError(f"cannot write curve {path}: {e}")

    @classmethod
    def read(cls, path: str) -> "LearningCurve":
        try:
            with open(path, newline="") as f:
                records = list(csv.DictReader(f))
        except OSError as e:
            raise DataError(f"cannot read curve {path}: {e}")
        return cls(rows=[CurveRow(**r) for r in records])
