import os
from typing import Dict, Optional, Tuple

import structlog
from rich import print

from ..config import RunConfig
from ..dataset_io import LabeledDataset, load_cifar10, save_prepared, split
from ..output_formatting import dataset_table
from ..preprocess import (PreprocStats, apply_pipeline, fit_pipeline,
                          pipeline_hash)
from ..utils.errors import ConfigError
from .common import PREPARED_FILES, STATS_FILE, write_run_metadata

log = structlog.get_logger(__name__)


def load_raw(config: RunConfig, with_test: bool = True
             ) -> Tuple[LabeledDataset, Optional[LabeledDataset]]:
    if not config.train_paths:
        raise ConfigError("no train_paths configured")
    raw = load_cifar10(config.train_paths, limit=config.subset)
    test = None
    if with_test and config.test_paths:
        test = load_cifar10(config.test_paths)
    return raw, test


def build_prepared_sets(config: RunConfig, raw: LabeledDataset,
                        test: Optional[LabeledDataset] = None
                        ) -> Tuple[Dict[str, LabeledDataset],
                                   Optional[PreprocStats]]:
    """Split ``raw``, fit the pipeline on the training part and apply it
    to every set."""
    spec = config.pipeline_spec()
    train_raw, val_raw = split(raw, config.train_fraction, config.split_seed)
    stats = fit_pipeline(spec, train_raw.images)
    stats_hash = pipeline_hash(spec, stats)
    sources = {"train": train_raw, "validation": val_raw}
    if test is not None:
        sources["test"] = test
    sets = {name: ds.with_images(apply_pipeline(spec, stats, ds.images),
                                 spec.label, stats_hash)
            for name, ds in sources.items()}
    return sets, stats


class prepare_dataset:
    """Fits preprocessing on the training split and writes every
    transformed set, plus the fitted statistics when the pipeline has
    any."""

    def __init__(self, config: RunConfig) -> None:
        self.config: RunConfig = config
        self.out_dir: str = config.prepared_path
        self.sets: Dict[str, LabeledDataset] = {}
        self.stats: Optional[PreprocStats] = None
        self.main_process()

    def main_process(self) -> None:
        raw, test = load_raw(self.config)
        self.sets, self.stats = build_prepared_sets(self.config, raw, test)
        os.makedirs(self.out_dir, exist_ok=True)
        for name, ds in self.sets.items():
            save_prepared(os.path.join(self.out_dir, PREPARED_FILES[name]),
                          ds)
        if self.stats is not None:
            self.stats.save(os.path.join(self.out_dir, STATS_FILE))
        write_run_metadata(self.config, self.out_dir,
                           stats_hash=self.sets["train"].stats_hash)
        log.info("prepared sets written", out_dir=self.out_dir,
                 pipeline=self.config.pipeline_spec().label)
        print(dataset_table(self.sets))
        print(f"Prepared data saved to: {self.out_dir}")
