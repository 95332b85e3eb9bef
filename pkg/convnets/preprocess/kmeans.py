"""
Spherical K-means dictionary learning and the thresholded encoder

    z = max(0, |D^T x| - alpha)
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import structlog

from ..tensor_core import load_bundle, save_bundle
from ..utils.errors import DataError, DimensionError

log = structlog.get_logger(__name__)

DEFAULT_PATCH_SIZE = 6
DEFAULT_ITERS = 10
DEFAULT_ALPHA = 0.25
_NORM_FLOOR = 1e-12


@dataclass
class Dictionary:
    """Unit-norm centroids stored as the columns of ``D`` ([P, C])."""

    D: np.ndarray
    alpha: float = DEFAULT_ALPHA
    patch_size: int = DEFAULT_PATCH_SIZE
    channels: int = 3

    @property
    def n_centroids(self) -> int:
        return self.D.shape[1]

    def column_norms(self) -> np.ndarray:
        return np.linalg.norm(self.D, axis=0)

    def save(self, path: str) -> None:
        save_bundle(path, {"D": self.D},
                    {"kind": "dictionary", "alpha": self.alpha,
                     "patch_size": self.patch_size,
                     "channels": self.channels})

    @classmethod
    def load(cls, path: str) -> "Dictionary":
        tensors, meta = load_bundle(path)
        if meta.get("kind") != "dictionary":
            raise DataError(f"{path} does not hold a dictionary")
        return cls(D=tensors["D"], alpha=meta["alpha"],
                   patch_size=meta["patch_size"], channels=meta["channels"])


def extract_patches(images: np.ndarray, patch_size: int, count: int,
                    seed: int = 0) -> np.ndarray:
    """Draw ``count`` random square patches, flattened channel-major."""
    n, c, h, w = images.shape
    if patch_size > h or patch_size > w:
        raise DimensionError("patch larger than the image",
                             patch=patch_size, image=(h, w))
    rng = np.random.default_rng(seed)
    which = rng.integers(0, n, size=count)
    rows = rng.integers(0, h - patch_size + 1, size=count)
    cols = rng.integers(0, w - patch_size + 1, size=count)
    patches = np.empty((count, c * patch_size * patch_size))
    for k in range(count):
        patch = images[which[k], :, rows[k]:rows[k] + patch_size,
                       cols[k]:cols[k] + patch_size]
        patches[k] = patch.reshape(-1)
    return patches


def _normalize_rows(x: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(x, axis=1, keepdims=True)
    return x / np.maximum(norms, _NORM_FLOOR)


def _assign(patches: np.ndarray, centroids: np.ndarray
            ) -> Tuple[np.ndarray, np.ndarray]:
    similarity = patches @ centroids.T
    assignment = np.argmax(similarity, axis=1)
    best = similarity[np.arange(patches.shape[0]), assignment]
    return assignment, best


def learn_dictionary(patches: np.ndarray, n_centroids: int,
                     iters: int = DEFAULT_ITERS, seed: int = 0,
                     alpha: float = DEFAULT_ALPHA,
                     patch_size: int = DEFAULT_PATCH_SIZE,
                     channels: int = 3) -> Dictionary:
    """Spherical K-means on [M, P] patches.

    Centroids start from distinct random patches. Each iteration assigns
    every patch to its highest dot-product centroid and replaces each
    centroid by the normalised sum of its members. An empty cluster is
    re-seeded from the patch that sits farthest from its own centroid.
    """
    m = patches.shape[0]
    if m < n_centroids:
        raise DataError("fewer patches than centroids",
                        patches=m, centroids=n_centroids)
    x = _normalize_rows(patches.astype(np.float64))
    rng = np.random.default_rng(seed)
    centroids = x[rng.choice(m, size=n_centroids, replace=False)].copy()

    for it in range(iters):
        assignment, best = _assign(x, centroids)
        sums = np.zeros_like(centroids)
        np.add.at(sums, assignment, x)
        norms = np.linalg.norm(sums, axis=1)

        empty = np.flatnonzero(norms <= _NORM_FLOOR)
        farthest = np.argsort(best, kind="stable")
        for slot, cluster in enumerate(empty):
            sums[cluster] = x[farthest[slot]]
            norms[cluster] = np.linalg.norm(sums[cluster])
        if len(empty):
            log.debug("clusters re-seeded", iteration=it, count=len(empty))
        centroids = sums / np.maximum(norms, _NORM_FLOOR)[:, None]

    log.info("dictionary learned", centroids=n_centroids, patches=m,
             iters=iters, alpha=alpha)
    return Dictionary(D=centroids.T.copy(), alpha=alpha,
                      patch_size=patch_size, channels=channels)


def encode(dictionary: Dictionary, x: np.ndarray) -> np.ndarray:
    if x.shape[-1] != dictionary.D.shape[0]:
        raise DimensionError("patch dimension does not match the dictionary",
                             patch=x.shape[-1], dictionary=dictionary.D.shape)
    return np.maximum(0.0, np.abs(x @ dictionary.D) - dictionary.alpha)
