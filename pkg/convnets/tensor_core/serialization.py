"""
Binary tensor format and the named-tensor bundle built on it.

Single tensor (little-endian)::

    b"TNSR" | u32 rank | u32 dim * rank | float64 payload (row-major)

Bundle::

    b"TNSB" | u32 meta length | meta (canonical JSON, utf-8)
            | u32 tensor count | (u32 name length | name | tensor) * count

Bundles back checkpoints, preprocessing statistics, dictionaries and
prepared datasets. Writes go to a temp file first and are renamed in place.
"""
import json
import os
import struct
import tempfile
from typing import Any, Dict, Mapping, Tuple

import numpy as np

from ..utils.errors import DataError
from .ops import Tensor

TENSOR_MAGIC = b"TNSR"
BUNDLE_MAGIC = b"TNSB"
_U32 = struct.Struct("<I")


def encode_tensor(t: np.ndarray) -> bytes:
    t = np.asarray(t)
    header = TENSOR_MAGIC + _U32.pack(t.ndim)
    header += b"".join(_U32.pack(int(d)) for d in t.shape)
    payload = np.ascontiguousarray(t, dtype="<f8").tobytes()
    return header + payload


def decode_tensor(buf: bytes, offset: int = 0) -> Tuple[Tensor, int]:
    if buf[offset:offset + 4] != TENSOR_MAGIC:
        raise DataError("bad tensor magic", offset=offset)
    offset += 4
    (rank,) = _unpack(buf, offset)
    offset += 4
    dims = []
    for _ in range(rank):
        (d,) = _unpack(buf, offset)
        dims.append(d)
        offset += 4
    count = int(np.prod(dims)) if dims else 1
    end = offset + 8 * count
    if end > len(buf):
        raise DataError("truncated tensor payload", expected=end,
                        size=len(buf))
    data = np.frombuffer(buf, dtype="<f8", count=count, offset=offset)
    return data.astype(np.float64).reshape(dims), end


def _unpack(buf: bytes, offset: int) -> Tuple[int]:
    if offset + 4 > len(buf):
        raise DataError("truncated header", offset=offset)
    return _U32.unpack_from(buf, offset)


def canonical_json(meta: Mapping[str, Any]) -> str:
    return json.dumps(meta, sort_keys=True, separators=(",", ":"))


def encode_bundle(tensors: Mapping[str, np.ndarray],
                  meta: Mapping[str, Any]) -> bytes:
    meta_bytes = canonical_json(meta).encode("utf-8")
    parts = [BUNDLE_MAGIC, _U32.pack(len(meta_bytes)), meta_bytes,
             _U32.pack(len(tensors))]
    for name, tensor in tensors.items():
        name_bytes = name.encode("utf-8")
        parts.append(_U32.pack(len(name_bytes)))
        parts.append(name_bytes)
        parts.append(encode_tensor(tensor))
    return b"".join(parts)


def decode_bundle(buf: bytes) -> Tuple[Dict[str, Tensor], Dict[str, Any]]:
    if buf[:4] != BUNDLE_MAGIC:
        raise DataError("not a tensor bundle")
    offset = 4
    (meta_len,) = _unpack(buf, offset)
    offset += 4
    meta = json.loads(buf[offset:offset + meta_len].decode("utf-8"))
    offset += meta_len
    (count,) = _unpack(buf, offset)
    offset += 4
    tensors: Dict[str, Tensor] = {}
    for _ in range(count):
        (name_len,) = _unpack(buf, offset)
        offset += 4
        name = buf[offset:offset + name_len].decode("utf-8")
        offset += name_len
        tensors[name], offset = decode_tensor(buf, offset)
    return tensors, meta


def atomic_write_bytes(path: str, data: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


def save_bundle(path: str, tensors: Mapping[str, np.ndarray],
                meta: Mapping[str, Any]) -> None:
    atomic_write_bytes(path, encode_bundle(tensors, meta))


def load_bundle(path: str) -> Tuple[Dict[str, Tensor], Dict[str, Any]]:
    try:
        with open(path, "rb") as f:
            buf = f.read()
    except OSError as e:
        raise DataError(f"cannot read {path}: {e}")
    return decode_bundle(buf)
