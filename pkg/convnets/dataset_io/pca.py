from typing import Tuple

import numpy as np
import structlog

from ..utils.errors import DataError
from .cifar import LabeledDataset

log = structlog.get_logger(__name__)


def leading_components(x: np.ndarray, count: int = 2) -> np.ndarray:
    """Top ``count`` covariance eigenvectors as columns, largest first.

    Each vector's largest-magnitude coordinate is made positive.
    """
    centered = x - x.mean(axis=0)
    cov = centered.T @ centered / x.shape[0]
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals, kind="stable")[::-1][:count]
    components = eigvecs[:, order]
    for j in range(components.shape[1]):
        pivot = np.argmax(np.abs(components[:, j]))
        if components[pivot, j] < 0:
            components[:, j] = -components[:, j]
    return components


def pca2(ds: LabeledDataset, sample_cap: int = 10000,
         seed: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    """Project every image onto the two leading principal directions.

    The directions are fitted on at most ``sample_cap`` rows drawn with
    ``seed``; all rows are centred with the fitted mean and projected.
    """
    n = len(ds)
    if n < 2:
        raise DataError("pca2 needs at least two samples", n=n)
    x = ds.flat.astype(np.float64)
    fit_rows = x
    if n > sample_cap:
        idx = np.sort(np.random.default_rng(seed).choice(
            n, size=sample_cap, replace=False))
        fit_rows = x[idx]
    mean = fit_rows.mean(axis=0)
    components = leading_components(fit_rows, 2)
    projected = (x - mean) @ components
    log.info("pca2 projected", n=n, fitted_on=fit_rows.shape[0])
    return projected, ds.labels.copy()
