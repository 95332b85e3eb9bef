import os

import numpy as np
from rich import print

from ..config import RunConfig
from ..dataset_io import write_predictions
from ..objective import LossReport
from ..output_formatting import loss_report_table
from ..trainer import Checkpoint, evaluate
from ..utils.errors import ConfigError
from .common import load_prepared_set

PREDICTIONS_FILE = "predictions.csv"


class evaluate_checkpoint:
    """Loss, misclassification and accuracy of a checkpoint on one
    prepared set."""

    def __init__(self, config: RunConfig, checkpoint: str,
                 data: str = "validation") -> None:
        self.config: RunConfig = config
        self.checkpoint_path: str = checkpoint
        self.data: str = data
        self.report: LossReport = None
        self.main_process()

    def main_process(self) -> None:
        checkpoint = Checkpoint.load(self.checkpoint_path)
        dataset = load_prepared_set(self.config, self.data)
        self.report = evaluate(checkpoint, dataset, self.config.kernel)
        print(loss_report_table({self.data: self.report}))


class predict_labels:
    def __init__(self, config: RunConfig, checkpoint: str,
                 data: str = "test", output: str = "") -> None:
        self.config: RunConfig = config
        self.checkpoint_path: str = checkpoint
        self.data: str = data
        self.output: str = output or os.path.join(config.out_dir,
                                                  PREDICTIONS_FILE)
        self.main_process()

    def main_process(self) -> None:
        checkpoint = Checkpoint.load(self.checkpoint_path)
        dataset = load_prepared_set(self.config, self.data)
        if dataset.stats_hash != checkpoint.stats_hash:
            raise ConfigError("dataset preprocessing does not match the "
                              "checkpoint")
        probs = checkpoint.network(self.config.kernel).predict(dataset.images)
        labels = np.argmax(probs, axis=1)
        os.makedirs(os.path.dirname(os.path.abspath(self.output)),
                    exist_ok=True)
        write_predictions(dataset.ids, labels, dataset.class_names,
                          self.output)
        print(f"Predictions for {len(labels)} images saved to: "
              f"{self.output}")
