import os

import numpy as np
import pytest

from convnets.commands.compare import (PREPROCESSING_RUNS, run_study,
                                       study_configs)
from convnets.config import parse_run_config
from convnets.dataset_io import LabeledDataset, write_cifar10
from convnets.utils.errors import ConfigError
from conftest import synthetic_images

STUDY_CONFIG = """
train_paths = {train}
train_fraction = 0.8
out_dir = {out}
"""


def affine_images(n: int, seed: int = 0, classes: int = 2):
    """Integer images a * prototype + b with a per-image contrast a in
    {1, 2, 3} and offset b in [-20, 20]; no other noise."""
    rng = np.random.default_rng(seed)
    prototypes = rng.integers(20, 76, size=(classes, 3, 32, 32))
    labels = np.arange(n) % classes
    a = rng.integers(1, 4, size=(n, 1, 1, 1))
    b = rng.integers(-20, 21, size=(n, 1, 1, 1))
    return (a * prototypes[labels] + b).astype(np.float64), labels


def study_config(tmp_path, images, labels, extra: str = ""):
    path = os.path.join(str(tmp_path), "data_batch_1.bin")
    write_cifar10(LabeledDataset(images=images, labels=labels), path)
    text = STUDY_CONFIG.format(train=path,
                               out=os.path.join(str(tmp_path), "runs"))
    return parse_run_config(text + extra)


class TestStudyConfigs:
    def test_initial_runs_use_their_presets(self, tmp_path):
        config = parse_run_config("max_epochs = 7\n")
        runs = study_configs(config, "initial")
        assert list(runs) == ["baseline", "initial_cnn"]

        baseline = runs["baseline"]
        assert baseline.model == "baseline"
        assert baseline.pipeline == "rescale-center"
        assert baseline.schedule.momentum_kind == "classical"
        assert baseline.schedule.momentum_start == 0.9
        assert baseline.schedule.base_lr == 0.12
        assert baseline.schedule.max_norm is None
        assert baseline.schedule.max_epochs == 7

        cnn = runs["initial_cnn"]
        assert cnn.pipeline == "gray-rescale-center"
        assert cnn.model_spec().input_shape == (1, 32, 32)
        assert cnn.schedule.base_lr == 1.0
        assert cnn.schedule.momentum_start == 0.0

    def test_presets_keep_thirty_epochs_without_a_cap(self):
        runs = study_configs(parse_run_config(""), "initial")
        assert {r.schedule.max_epochs for r in runs.values()} == {30}

    def test_preprocessing_runs_are_gray(self):
        runs = study_configs(parse_run_config(""), "preprocessing")
        assert len(runs) == len(PREPROCESSING_RUNS)
        for label, run in runs.items():
            assert label.startswith("gray-")
            assert run.model == "initial_cnn"
            assert run.model_spec().input_shape == (1, 32, 32)
            assert run.schedule.base_lr == 1.0
        assert "gray-gcn-zca+rescale-after" in runs

    def test_runs_hash_differently(self):
        runs = study_configs(parse_run_config(""), "preprocessing")
        hashes = {run.resolved_hash() for run in runs.values()}
        assert len(hashes) == len(runs)

    def test_unknown_study(self):
        with pytest.raises(ConfigError):
            study_configs(parse_run_config(""), "dropout")

    def test_unknown_run_label(self, tmp_path):
        images, labels = synthetic_images(20, seed=0)
        config = study_config(tmp_path, images, labels)
        with pytest.raises(ConfigError) as err:
            run_study(config, "initial", only=["mlp"])
        assert err.value.context["runs"] == "mlp"


@pytest.mark.slow
class TestDirectionalResults:
    """Orderings of best validation error on small synthetic sets."""

    def test_initial_cnn_not_worse_than_baseline(self, tmp_path):
        images, labels = synthetic_images(500, seed=7, classes=2)
        config = study_config(tmp_path, images, labels)
        curves = run_study(config, "initial")
        assert len(curves["baseline"]) == 30
        assert len(curves["initial_cnn"]) == 30
        assert (curves["initial_cnn"].best_val_error()
                <= curves["baseline"].best_val_error())

    def test_gcn_zca_not_worse_than_rescale_center(self, tmp_path):
        images, labels = affine_images(500, seed=11)
        config = study_config(tmp_path, images, labels, "max_epochs = 150\n")
        curves = run_study(config, "preprocessing",
                           only=["gray-rescale-center", "gray-gcn-zca"])
        assert (curves["gray-gcn-zca"].best_val_error()
                <= curves["gray-rescale-center"].best_val_error())
