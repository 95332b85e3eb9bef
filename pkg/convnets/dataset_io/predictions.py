import csv
import io
from typing import Sequence

import numpy as np

from ..tensor_core import atomic_write_bytes
from ..utils.errors import DataError


def _write_csv(path: str, header: Sequence[str], rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    try:
        atomic_write_bytes(path, buf.getvalue().encode("utf-8"))
    except OSError as e:
        raise DataError(f"cannot write {path}: {e}")


def write_predictions(ids: Sequence[int], labels: Sequence[int],
                      class_names: Sequence[str], path: str) -> None:
    if len(ids) != len(labels):
        raise DataError("ids and labels differ in length",
                        ids=len(ids), labels=len(labels))
    rows = ((int(i), class_names[int(label)])
            for i, label in zip(ids, labels))
    _write_csv(path, ("id", "label"), rows)


def write_scatter(points: np.ndarray, labels: Sequence[int],
                  class_names: Sequence[str], path: str) -> None:
    if points.shape[0] != len(labels):
        raise DataError("points and labels differ in length")
    rows = ((repr(float(x)), repr(float(y)), class_names[int(label)])
            for (x, y), label in zip(points, labels))
    _write_csv(path, ("x", "y", "label"), rows)
