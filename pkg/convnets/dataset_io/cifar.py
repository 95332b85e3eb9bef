import math
import os
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
import structlog

from ..tensor_core import load_bundle, save_bundle, atomic_write_bytes
from ..utils.errors import ConfigError, DataError

log = structlog.get_logger(__name__)

CLASS_NAMES: Tuple[str, ...] = (
    "airplane", "automobile", "bird", "cat", "deer",
    "dog", "frog", "horse", "ship", "truck",
)
RECORD_BYTES = 3073
IMAGE_SHAPE = (3, 32, 32)


@dataclass
class LabeledDataset:
    images: np.ndarray
    labels: np.ndarray
    class_names: Tuple[str, ...] = CLASS_NAMES
    ids: Optional[np.ndarray] = None
    stats_hash: str = ""
    pipeline: str = "raw"

    def __post_init__(self) -> None:
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.images.shape[0] != self.labels.shape[0]:
            raise DataError("image and label counts differ",
                            images=self.images.shape[0],
                            labels=self.labels.shape[0])
        if self.labels.size and (self.labels.min() < 0 or
                                 self.labels.max() >= len(self.class_names)):
            raise DataError("label out of range",
                            max_label=int(self.labels.max()))
        if self.ids is None:
            self.ids = np.arange(1, len(self.labels) + 1, dtype=np.int64)

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    @property
    def flat(self) -> np.ndarray:
        return self.images.reshape(len(self), -1)

    def subset(self, indices: Sequence[int]) -> "LabeledDataset":
        indices = np.asarray(indices, dtype=np.int64)
        return LabeledDataset(
            images=self.images[indices],
            labels=self.labels[indices],
            class_names=self.class_names,
            ids=self.ids[indices],
            stats_hash=self.stats_hash,
            pipeline=self.pipeline,
        )

    def with_images(self, images: np.ndarray, pipeline: str,
                    stats_hash: str) -> "LabeledDataset":
        return LabeledDataset(
            images=images, labels=self.labels.copy(),
            class_names=self.class_names, ids=self.ids.copy(),
            stats_hash=stats_hash, pipeline=pipeline)


def _read_records(path: str) -> np.ndarray:
    if not os.path.isfile(path):
        raise DataError(f"CIFAR batch file not found: {path}")
    with open(path, "rb") as f:
        raw = f.read()
    if len(raw) == 0 or len(raw) % RECORD_BYTES != 0:
        raise DataError(f"truncated CIFAR batch file: {path}",
                        size=len(raw), record_bytes=RECORD_BYTES)
    return np.frombuffer(raw, dtype=np.uint8).reshape(-1, RECORD_BYTES)


def load_cifar10(paths: Iterable[str],
                 limit: Optional[int] = None) -> LabeledDataset:
    """Load CIFAR-10 binary batches.

    Each record is one label byte followed by 3072 pixel bytes laid out as
    the red plane, then green, then blue, each row-major.
    """
    paths = list(paths)
    if not paths:
        raise DataError("no CIFAR batch files given")
    records = np.concatenate([_read_records(p) for p in paths], axis=0)
    if limit is not None:
        records = records[:limit]
    labels = records[:, 0].astype(np.int64)
    if labels.max() >= len(CLASS_NAMES):
        bad = int(np.argmax(labels >= len(CLASS_NAMES)))
        raise DataError("label byte out of range", record=bad,
                        label=int(labels[bad]))
    images = records[:, 1:].reshape((-1,) + IMAGE_SHAPE).astype(np.float64)
    log.info("CIFAR batches loaded", files=len(paths), n=len(labels))
    return LabeledDataset(images=images, labels=labels)


def write_cifar10(ds: LabeledDataset, path: str) -> None:
    pixels = ds.images.reshape(len(ds), -1)
    if pixels.shape[1] != RECORD_BYTES - 1:
        raise DataError("only 3x32x32 images fit the CIFAR record layout",
                        shape=tuple(ds.images.shape[1:]))
    if np.any(pixels < 0) or np.any(pixels > 255) or \
            np.any(pixels != np.round(pixels)):
        raise DataError("pixels must be integers in [0, 255]")
    records = np.empty((len(ds), RECORD_BYTES), dtype=np.uint8)
    records[:, 0] = ds.labels
    records[:, 1:] = pixels
    atomic_write_bytes(path, records.tobytes())


def split(ds: LabeledDataset, fraction: float,
          seed: int) -> Tuple[LabeledDataset, LabeledDataset]:
    """Shuffle with ``seed`` and cut at ``floor(N * fraction)``."""
    if not 0.0 < fraction < 1.0:
        raise ConfigError("split fraction must lie in (0, 1)",
                          fraction=fraction)
    n = len(ds)
    n_train = int(math.floor(n * fraction))
    if n_train == 0 or n_train == n:
        raise ConfigError("split leaves an empty partition",
                          n=n, fraction=fraction)
    order = np.random.default_rng(seed).permutation(n)
    train, validation = ds.subset(order[:n_train]), ds.subset(order[n_train:])
    log.info("dataset split", train=len(train), validation=len(validation),
             seed=seed)
    return train, validation


def save_prepared(path: str, ds: LabeledDataset) -> None:
    save_bundle(
        path,
        {"images": ds.images, "labels": ds.labels.astype(np.float64),
         "ids": ds.ids.astype(np.float64)},
        {"class_names": list(ds.class_names), "pipeline": ds.pipeline,
         "stats_hash": ds.stats_hash},
    )


def load_prepared(path: str) -> LabeledDataset:
    tensors, meta = load_bundle(path)
    try:
        return LabeledDataset(
            images=tensors["images"],
            labels=tensors["labels"].astype(np.int64),
            ids=tensors["ids"].astype(np.int64),
            class_names=tuple(meta["class_names"]),
            stats_hash=meta["stats_hash"],
            pipeline=meta["pipeline"],
        )
    except KeyError as e:
        raise DataError(f"prepared dataset {path} is missing {e}")


def class_counts(ds: LabeledDataset) -> List[int]:
    return np.bincount(ds.labels, minlength=len(ds.class_names)).tolist()
