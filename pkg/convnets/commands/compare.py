"""
Comparison studies: the same training run repeated over preprocessing
pipelines, over hidden activations, or the MLP baseline against the first
CNN.
"""
import os
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
import structlog
from rich import print

from ..config import RunConfig
from ..optimizer import SCHEDULE_PRESETS, TrainSchedule
from ..output_formatting import comparison_table
from ..trainer import LearningCurve, train
from ..utils.errors import ConfigError
from .prepare import build_prepared_sets, load_raw

log = structlog.get_logger(__name__)

STUDIES = ("initial", "preprocessing", "activations")

# grayscale keeps the initial CNN's input at one channel
PREPROCESSING_RUNS: Tuple[Tuple[str, str], ...] = (
    ("gray-raw", "none"),
    ("gray-rescale-center", "none"),
    ("gray-gcn", "none"),
    ("gray-gcn", "before"),
    ("gray-gcn", "after"),
    ("gray-gcn-zca", "none"),
    ("gray-gcn-zca", "before"),
    ("gray-gcn-zca", "after"),
)
ACTIVATION_RUNS = ("relu", "tanh", "sigmoid")
# label: (model, pipeline, schedule preset)
INITIAL_RUNS: Dict[str, Tuple[str, str, str]] = {
    "baseline": ("baseline", "rescale-center", "baseline"),
    "initial_cnn": ("initial_cnn", "gray-rescale-center", "initial_cnn"),
}


def preset_schedule(config: RunConfig, preset: str) -> TrainSchedule:
    """The preset's schedule; a configured epoch cap still wins."""
    schedule = SCHEDULE_PRESETS[preset]()
    if config.schedule.max_epochs is not None:
        schedule = schedule.model_copy(
            update={"max_epochs": config.schedule.max_epochs})
    return schedule


def study_configs(config: RunConfig, study: str) -> Dict[str, RunConfig]:
    """One config per run of ``study``, keyed by run label.

    The initial and preprocessing studies train under the architectures'
    own schedule presets; the activation study keeps the configured
    schedule.
    """
    runs: Dict[str, RunConfig] = {}
    if study == "initial":
        for label, (model, pipeline, preset) in INITIAL_RUNS.items():
            runs[label] = config.model_copy(update={
                "model": model, "variant": "plain", "activation": None,
                "layers": None, "pipeline": pipeline,
                "rescale_order": "none", "schedule_preset": preset,
                "schedule": preset_schedule(config, preset)})
    elif study == "preprocessing":
        schedule = preset_schedule(config, "initial_cnn")
        for pipeline, order in PREPROCESSING_RUNS:
            run = config.model_copy(update={
                "model": "initial_cnn", "variant": "plain",
                "activation": None, "layers": None, "pipeline": pipeline,
                "rescale_order": order, "schedule_preset": "initial_cnn",
                "schedule": schedule})
            runs[run.pipeline_spec().label] = run
    elif study == "activations":
        for fn in ACTIVATION_RUNS:
            runs[fn] = config.model_copy(update={
                "model": "activation_study", "layers": None,
                "activation": fn})
    else:
        raise ConfigError(f"unknown study: {study}", valid=", ".join(STUDIES))
    return runs


def run_study(config: RunConfig, study: str,
              only: Optional[Iterable[str]] = None
              ) -> Dict[str, LearningCurve]:
    """Train the runs of ``study`` (or the ``only`` labels) on one shared
    split; curves land under ``<out_dir>/<study>/<label>``."""
    runs = study_configs(config, study)
    if only is not None:
        wanted = list(only)
        unknown = [label for label in wanted if label not in runs]
        if unknown:
            raise ConfigError(f"unknown run in study {study}",
                              runs=", ".join(unknown))
        runs = {label: runs[label] for label in wanted}
    raw, _ = load_raw(config, with_test=False)
    curves: Dict[str, LearningCurve] = {}
    for label, run in runs.items():
        sets, _ = build_prepared_sets(run, raw)
        result = train(run.model_spec(), run.schedule, sets["train"],
                       sets["validation"], run.seed,
                       config_hash=run.resolved_hash(),
                       kernel=run.kernel, dtype=np.dtype(run.dtype),
                       wall_clock=run.wall_clock,
                       out_dir=os.path.join(config.out_dir, study, label))
        curves[label] = result.curve
        log.info("study run finished", study=study, run=label,
                 epochs=len(result.curve),
                 best_val_error=result.curve.best_val_error())
    return curves


class comparison_study:
    """Trains every run of a study and tabulates the best validation
    errors."""

    def __init__(self, config: RunConfig, study: str) -> None:
        self.config: RunConfig = config
        self.study: str = study
        self.out_dir: str = os.path.join(config.out_dir, study)
        self.curves: Dict[str, LearningCurve] = {}
        self.main_process()

    def main_process(self) -> None:
        self.curves = run_study(self.config, self.study)
        print(comparison_table(self.curves))
        print(f"Lowest validation error: {self.ranking()[0]}")
        print(f"Study curves saved under: {self.out_dir}")

    def ranking(self) -> List[str]:
        return sorted(self.curves,
                      key=lambda k: self.curves[k].best_val_error())
