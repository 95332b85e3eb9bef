import hashlib
from typing import Literal, Optional, Tuple

import numpy as np
import structlog
from pydantic import BaseModel

from ..utils.errors import ConfigError, DataError
from .transforms import fit_center, fit_range, gcn, grayscale
from .transforms import rescale_center, rescale_range
from .zca import DEFAULT_FUDGE, PreprocStats, apply_zca, fit_zca

log = structlog.get_logger(__name__)

BASE_PIPELINES: Tuple[str, ...] = ("raw", "rescale-center", "gcn", "gcn-zca")
GRAY_PREFIX = "gray-"
PIPELINES: Tuple[str, ...] = BASE_PIPELINES + tuple(
    GRAY_PREFIX + name for name in BASE_PIPELINES)

RescaleOrder = Literal["none", "before", "after"]


class PipelineSpec(BaseModel):
    """Which transforms run, in order: grayscale, then the base pipeline.

    ``rescale_order`` only matters for the GCN pipelines: ``before`` divides
    raw pixels by 255 ahead of GCN, ``after`` maps GCN output into [0, 1]
    with the training range.
    """

    base: Literal["raw", "rescale-center", "gcn", "gcn-zca"] = "gcn-zca"
    gray: bool = False
    rescale_order: RescaleOrder = "none"
    fudge: float = DEFAULT_FUDGE

    @classmethod
    def from_name(cls, name: str, rescale_order: str = "none",
                  fudge: float = DEFAULT_FUDGE) -> "PipelineSpec":
        if name not in PIPELINES:
            raise ConfigError(
                f"unknown pipeline '{name}'; valid names: "
                + ", ".join(PIPELINES))
        gray = name.startswith(GRAY_PREFIX)
        base = name[len(GRAY_PREFIX):] if gray else name
        return cls(base=base, gray=gray, rescale_order=rescale_order,
                   fudge=fudge)

    @property
    def name(self) -> str:
        return (GRAY_PREFIX if self.gray else "") + self.base

    @property
    def label(self) -> str:
        if self.base.startswith("gcn") and self.rescale_order != "none":
            return f"{self.name}+rescale-{self.rescale_order}"
        return self.name

    @property
    def stateful(self) -> bool:
        return self.base in ("rescale-center", "gcn-zca") or (
            self.base == "gcn" and self.rescale_order == "after")


def _flatten(images: np.ndarray,
             spec: PipelineSpec) -> Tuple[np.ndarray, Tuple[int, ...]]:
    if spec.gray:
        images = grayscale(images)
    return images.reshape(images.shape[0], -1), images.shape[1:]


def _gcn_stage(x: np.ndarray, spec: PipelineSpec) -> np.ndarray:
    if spec.rescale_order == "before":
        x = x / 255.0
    return gcn(x)


def fit_pipeline(spec: PipelineSpec,
                 train_images: np.ndarray) -> Optional[PreprocStats]:
    """Fit the statistics ``spec`` needs on training images only."""
    if not spec.stateful:
        return None
    x, _ = _flatten(train_images, spec)
    if x.shape[0] < 2:
        raise DataError("need at least two training images to fit stats")

    if spec.base == "rescale-center":
        stats = PreprocStats(mean=fit_center(x), fudge=spec.fudge,
                             n_fit=x.shape[0])
    else:
        x = _gcn_stage(x, spec)
        value_range = None
        if spec.rescale_order == "after":
            value_range = fit_range(x)
            x = rescale_range(x, *value_range)
        if spec.base == "gcn-zca":
            stats = fit_zca(x, spec.fudge)
        else:
            stats = PreprocStats(mean=np.zeros(x.shape[1]), fudge=spec.fudge,
                                 n_fit=x.shape[0])
        stats.value_range = value_range
    stats.pipeline = spec.label
    log.info("pipeline fitted", pipeline=spec.label, n=stats.n_fit)
    return stats


def apply_pipeline(spec: PipelineSpec, stats: Optional[PreprocStats],
                   images: np.ndarray) -> np.ndarray:
    if spec.stateful and stats is None:
        raise DataError(f"pipeline {spec.label} needs fitted stats")
    x, image_shape = _flatten(images.astype(np.float64), spec)

    if spec.base == "rescale-center":
        x = rescale_center(x, stats.mean)
    elif spec.base in ("gcn", "gcn-zca"):
        x = _gcn_stage(x, spec)
        if spec.rescale_order == "after":
            x = rescale_range(x, *stats.value_range)
        if spec.base == "gcn-zca":
            x = apply_zca(stats, x)
    return x.reshape((x.shape[0],) + tuple(image_shape))


def pipeline_hash(spec: PipelineSpec, stats: Optional[PreprocStats]) -> str:
    digest = hashlib.sha256(spec.model_dump_json().encode("utf-8"))
    if stats is not None:
        digest.update(stats.fingerprint().encode("ascii"))
    return digest.hexdigest()
