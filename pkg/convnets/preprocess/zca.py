import hashlib
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
import structlog

from ..tensor_core import load_bundle, save_bundle
from ..tensor_core.serialization import encode_bundle
from ..utils.errors import DataError, DimensionError, NumericError

log = structlog.get_logger(__name__)

DEFAULT_FUDGE = 0.01


@dataclass
class PreprocStats:
    """Statistics fitted on the training split only.

    ``mean`` centres the data before ``zca`` (when present) is applied.
    """

    mean: np.ndarray
    zca: Optional[np.ndarray] = None
    fudge: float = DEFAULT_FUDGE
    n_fit: int = 0
    pipeline: str = ""
    value_range: Optional[Tuple[float, float]] = None

    def _tensors(self) -> Dict[str, np.ndarray]:
        tensors = {"mean": self.mean}
        if self.zca is not None:
            tensors["zca"] = self.zca
        return tensors

    def _meta(self) -> dict:
        meta = {"kind": "preproc", "fudge": self.fudge, "n_fit": self.n_fit,
                "pipeline": self.pipeline}
        if self.value_range is not None:
            meta["value_range"] = list(self.value_range)
        return meta

    def fingerprint(self) -> str:
        data = encode_bundle(self._tensors(), self._meta())
        return hashlib.sha256(data).hexdigest()

    def save(self, path: str) -> None:
        save_bundle(path, self._tensors(), self._meta())

    @classmethod
    def load(cls, path: str) -> "PreprocStats":
        tensors, meta = load_bundle(path)
        if meta.get("kind") != "preproc":
            raise DataError(f"{path} does not hold preprocessing stats")
        value_range = meta.get("value_range")
        return cls(
            mean=tensors["mean"],
            zca=tensors.get("zca"),
            fudge=meta["fudge"],
            n_fit=meta["n_fit"],
            pipeline=meta["pipeline"],
            value_range=tuple(value_range) if value_range else None,
        )


def fit_zca(x_train: np.ndarray, fudge: float = DEFAULT_FUDGE
            ) -> PreprocStats:
    """Fit W = E diag(1/sqrt(lambda + fudge)) E^T on [N, D] rows.

    The covariance is normalised by N.
    """
    if x_train.ndim != 2:
        raise DimensionError("fit_zca takes flattened [N, D] rows",
                             shape=tuple(x_train.shape))
    n = x_train.shape[0]
    if n < 2:
        raise DataError("fit_zca needs at least two samples", n=n)
    mean = x_train.mean(axis=0)
    centered = x_train - mean
    cov = centered.T @ centered / n
    if not np.all(np.isfinite(cov)):
        raise NumericError("covariance has non-finite entries")

    eigvals, eigvecs = np.linalg.eigh(cov)
    eigvals = np.maximum(eigvals, 0.0)
    shifted = eigvals + fudge
    if np.any(shifted <= 0):
        raise NumericError("covariance is singular; use a positive fudge",
                           smallest=float(eigvals.min()))
    w = (eigvecs * (1.0 / np.sqrt(shifted))) @ eigvecs.T
    w = 0.5 * (w + w.T)
    log.info("zca fitted", n=n, dims=x_train.shape[1], fudge=fudge)
    return PreprocStats(mean=mean, zca=w, fudge=fudge, n_fit=n)


def apply_zca(stats: PreprocStats, x: np.ndarray) -> np.ndarray:
    if stats.zca is None:
        raise DataError("stats carry no ZCA matrix")
    if x.ndim != 2 or x.shape[1] != stats.zca.shape[0]:
        raise DimensionError("zca dimension mismatch",
                             data=tuple(x.shape), zca=tuple(stats.zca.shape))
    return (x - stats.mean) @ stats.zca
