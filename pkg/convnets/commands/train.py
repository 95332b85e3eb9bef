import os
from typing import Optional

import numpy as np
import structlog
from rich import print

from ..config import RunConfig
from ..model_zoo import ModelSpec, parameter_count
from ..output_formatting import (ArchitectureGraphPlot, curve_table,
                                 schedule_table, shape_chain_table)
from ..trainer import BEST_FILE, CURVE_FILE, Checkpoint, TrainResult, train
from .common import check_pipeline, load_prepared_set, write_run_metadata

log = structlog.get_logger(__name__)


class train_model:
    """Trains the configured model on the prepared train/validation sets.

    With ``dry_run`` only the resolved spec, its shape chain and the
    schedule are printed; no data is read.
    """

    def __init__(self, config: RunConfig, dry_run: bool = False,
                 info_graphic: bool = False,
                 resume: Optional[str] = None) -> None:
        self.config: RunConfig = config
        self.dry_run: bool = dry_run
        self.info_graphic: bool = info_graphic
        self.resume: Optional[str] = resume
        self.spec: ModelSpec = config.model_spec()
        self.result: Optional[TrainResult] = None
        self.main_process()

    def describe(self) -> None:
        print(shape_chain_table(self.spec))
        print(f"Parameters: {parameter_count(self.spec)}")
        print(schedule_table(self.config.schedule))
        if self.info_graphic:
            ArchitectureGraphPlot(self.spec, self.config.out_dir).render()

    def main_process(self) -> None:
        self.describe()
        if self.dry_run:
            return
        cfg = self.config
        train_set = load_prepared_set(cfg, "train")
        val_set = load_prepared_set(cfg, "validation")
        check_pipeline(cfg, train_set)
        resume = Checkpoint.load(self.resume) if self.resume else None

        self.result = train(
            self.spec, cfg.schedule, train_set, val_set, cfg.seed,
            config_hash=cfg.resolved_hash(), kernel=cfg.kernel,
            dtype=np.dtype(cfg.dtype), wall_clock=cfg.wall_clock,
            resume=resume, out_dir=cfg.out_dir)
        log.info("training finished", epochs=len(self.result.curve),
                 stopped_early=self.result.stopped_early)
        write_run_metadata(cfg, cfg.out_dir,
                           stats_hash=train_set.stats_hash,
                           epochs=len(self.result.curve),
                           stopped_early=self.result.stopped_early)

        print(curve_table(self.result.curve))
        best_error = min(r.val_error for r in self.result.curve.rows)
        print(f"Best validation error {best_error:.4f} after "
              f"{self.result.best.epoch} epochs")
        print(f"Curve saved to: {os.path.join(cfg.out_dir, CURVE_FILE)}")
        print(f"Best checkpoint saved to: "
              f"{os.path.join(cfg.out_dir, BEST_FILE)}")
