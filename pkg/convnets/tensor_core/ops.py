"""
Checked array kernels shared by every other module.

Tensors are plain ``numpy.ndarray`` values (NCHW for images). Every function
here returns a fresh array and leaves its inputs untouched.
"""
from numbers import Real
from typing import Optional, Sequence, Tuple, Union

import numpy as np
import numpy.typing as npt

from ..utils.errors import DimensionError, NumericError

Tensor = npt.NDArray[np.floating]
Operand = Union[Tensor, float]

ELEMENTWISE_OPS = ("add", "sub", "mul", "max", "scale", "abs")
REDUCE_OPS = ("sum", "mean", "max", "argmax")


def as_tensor(values, dtype=np.float64) -> Tensor:
    return np.array(values, dtype=dtype)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise DimensionError(
            "matmul shape mismatch",
            left=tuple(a.shape), right=tuple(b.shape))
    return np.matmul(a, b)


def _is_scalar(b: Operand) -> bool:
    return isinstance(b, Real) or (isinstance(b, np.ndarray) and b.ndim == 0)


def elementwise(op: str, a: Tensor, b: Optional[Operand] = None) -> Tensor:
    if op not in ELEMENTWISE_OPS:
        raise DimensionError(f"Unknown elementwise op: {op}")
    if op == "abs":
        return np.abs(a)
    if b is None:
        raise DimensionError(f"{op} needs a second operand")
    if op == "scale" and not _is_scalar(b):
        raise DimensionError("scale takes a scalar factor")
    if not _is_scalar(b) and tuple(np.shape(b)) != tuple(a.shape):
        raise DimensionError(
            f"{op} shape mismatch",
            left=tuple(a.shape), right=tuple(np.shape(b)))

    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op in ("mul", "scale"):
        return a * b
    return np.maximum(a, b)


def reduce(op: str, a: Tensor, axis: Optional[int] = None) -> Tensor:
    """Reduce along ``axis``, all axes when None. Ties go to the lowest
    index."""
    if op not in REDUCE_OPS:
        raise DimensionError(f"Unknown reduce op: {op}")
    if axis is not None and not -a.ndim <= axis < a.ndim:
        raise DimensionError("invalid axis", axis=axis, rank=a.ndim)
    length = a.size if axis is None else a.shape[axis]
    if length == 0 and op != "sum":
        raise DimensionError(f"{op} over an empty axis", axis=axis)

    if op == "sum":
        return np.sum(a, axis=axis)
    if op == "mean":
        return np.mean(a, axis=axis)
    if op == "max":
        return np.max(a, axis=axis)
    return np.argmax(a, axis=axis)


def reshape(a: Tensor, shape: Sequence[int]) -> Tensor:
    shape = tuple(int(s) for s in shape)
    if int(np.prod(shape)) != a.size or any(s < 0 for s in shape):
        raise DimensionError(
            "reshape changes the element count",
            source=tuple(a.shape), target=shape)
    return a.reshape(shape).copy()


def transpose2d(a: Tensor) -> Tensor:
    if a.ndim != 2:
        raise DimensionError("transpose2d needs a rank-2 tensor",
                             shape=tuple(a.shape))
    return np.ascontiguousarray(a.T)


def slice_(a: Tensor, bounds: Sequence[Tuple[int, int]]) -> Tensor:
    if len(bounds) > a.ndim:
        raise DimensionError("more slice bounds than axes",
                             rank=a.ndim, bounds=len(bounds))
    index = []
    for axis, (start, stop) in enumerate(bounds):
        if not 0 <= start <= stop <= a.shape[axis]:
            raise DimensionError(
                "slice out of bounds", axis=axis,
                start=start, stop=stop, size=a.shape[axis])
        index.append(slice(start, stop))
    return a[tuple(index)].copy()


def check_finite(a: Tensor, name: str = "tensor") -> Tensor:
    if not np.all(np.isfinite(a)):
        bad = int(np.size(a) - np.count_nonzero(np.isfinite(a)))
        raise NumericError(f"{name} has non-finite entries", count=bad)
    return a
