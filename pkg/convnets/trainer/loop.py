"""
The mini-batch training loop.

Per epoch: shuffle, then for every batch evaluate the train-mode gradient
(at the lookahead point for Nesterov momentum), update, and project the
weights onto their max-norm balls. After the last batch both splits are
evaluated in inference mode, the curve grows by one row and the
early-stop window by one error.
"""
import os
import time
from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np
import structlog

from ..dataset_io import BatchIterator, LabeledDataset
from ..layers import LayerParams
from ..model_zoo import InitPolicy, ModelSpec, Network, initialize
from ..objective import LossReport, softmax_xent_backward
from ..optimizer import (TrainSchedule, classical_step, lr_at, momentum_at,
                         nag_step, zero_velocity)
from ..utils.errors import ConfigError, DimensionError, NumericError
from .checkpoint import Checkpoint
from .curve import CurveRow, LearningCurve
from .early_stop import EarlyStopState

log = structlog.get_logger(__name__)

BEST_FILE = "best.ckpt"
LAST_FILE = "last.ckpt"
CURVE_FILE = "curve.csv"

EpochCallback = Callable[[CurveRow], None]
BestCallback = Callable[[Checkpoint], None]
BatchCallback = Callable[[int, int], None]


@dataclass
class TrainResult:
    best: Checkpoint
    last: Checkpoint
    curve: LearningCurve
    stopped_early: bool


def derive_seeds(seed: int) -> List[int]:
    """Independent seeds for initialization, shuffling and dropout."""
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(3)]


def _check_grads(network: Network, grads: List[np.ndarray], epoch: int,
                 batch: int) -> None:
    parametric = network.spec.parametric()
    for i, g in enumerate(grads):
        if not np.all(np.isfinite(g)):
            raise NumericError("non-finite gradient", epoch=epoch,
                               batch=batch, layer=parametric[i // 2])


def batch_gradients(network: Network, x: np.ndarray, labels: np.ndarray,
                    epoch: int = 0, batch: int = 0) -> List[np.ndarray]:
    """Train-mode gradient of the mean loss at the current parameters."""
    z = network.logits(x, train=True)
    if not np.all(np.isfinite(z)):
        where = network.locate_nonfinite(x)
        raise NumericError("non-finite activations", epoch=epoch,
                           batch=batch,
                           layer=where[0] if where else len(network.layers))
    network.backward(softmax_xent_backward(z, labels))
    grads = network.gradients()
    _check_grads(network, grads, epoch, batch)
    return grads


def _score(network: Network, dataset: LabeledDataset, epoch: int,
           phase: str) -> LossReport:
    try:
        return network.evaluate(dataset.images, dataset.labels)
    except NumericError as e:
        context = dict(e.context, epoch=epoch, phase=phase)
        raise NumericError(e.message, **context) from e


class _Run:
    def __init__(self, spec: ModelSpec, schedule: TrainSchedule,
                 train_set: LabeledDataset, seed: int, kernel: str,
                 dtype, resume: Optional[Checkpoint]) -> None:
        init_seed, shuffle_seed, dropout_seed = derive_seeds(seed)
        self.spec = spec
        self.schedule = schedule
        params = resume.params if resume else initialize(
            spec, InitPolicy(seed=init_seed), dtype=dtype)
        self.network = Network(spec, params, dropout_seed, kernel, dtype)
        self.batches = BatchIterator(train_set, schedule.batch_size,
                                     shuffle_seed)
        self.early = EarlyStopState(schedule.early_stop_window or 1)
        self.curve = LearningCurve()
        self.best_params: List[LayerParams] = []
        self.epoch = 0

        if resume is None:
            self.network.project(schedule)
            self.velocity = zero_velocity(self.network.parameters())
            return
        self.velocity = [v.astype(self.network.dtype)
                         for v in resume.velocity]
        if resume.shuffle_state is not None:
            self.batches.state = resume.shuffle_state
        self.network.set_rng_states(resume.dropout_states)
        if resume.early_stop is not None:
            self.early = EarlyStopState.from_dict(resume.early_stop)
        self.curve = LearningCurve(rows=resume.curve)
        self.best_params = [p.copy() for p in resume.best_params]
        self.epoch = resume.epoch


def train(spec: ModelSpec, schedule: TrainSchedule,
          train_set: LabeledDataset, val_set: LabeledDataset, seed: int = 0,
          *, config_hash: str = "", kernel: str = "im2col",
          dtype=np.float64, wall_clock: bool = False,
          clock: Callable[[], float] = time.perf_counter,
          resume: Optional[Checkpoint] = None,
          out_dir: Optional[str] = None,
          on_epoch: Optional[EpochCallback] = None,
          on_best: Optional[BestCallback] = None,
          on_batch: Optional[BatchCallback] = None) -> TrainResult:
    """Train until early stopping or ``schedule.max_epochs``.

    With ``out_dir`` the curve, the running checkpoint and the best
    snapshot are rewritten after every epoch, so an abort leaves the
    previous epoch's files in place.
    """
    if schedule.max_epochs is None and schedule.early_stop_window is None:
        raise ConfigError("training needs max_epochs or early stopping")
    if len(train_set) == 0 or len(val_set) == 0:
        raise ConfigError("training and validation sets must be non-empty")
    if train_set.stats_hash != val_set.stats_hash:
        raise ConfigError("train and validation preprocessing differ")
    shape = spec.input_shape
    if int(np.prod(train_set.images.shape[1:])) != int(np.prod(shape)):
        raise DimensionError("images do not fit the model input",
                             images=train_set.images.shape[1:], input=shape)
    if resume is not None and resume.config_hash != config_hash:
        raise ConfigError("checkpoint was written by a different config",
                          checkpoint=resume.config_hash[:12],
                          config=config_hash[:12])

    run = _Run(spec, schedule, train_set, seed, kernel, dtype, resume)
    network = run.network
    nesterov = schedule.momentum_kind == "nesterov"
    stopped = False

    def snapshot(params: List[LayerParams], epoch: int,
                 running: bool) -> Checkpoint:
        ckpt = Checkpoint(spec=spec, params=params, epoch=epoch,
                          config_hash=config_hash,
                          stats_hash=train_set.stats_hash,
                          schedule=schedule.model_dump(mode="json"),
                          class_names=list(train_set.class_names))
        if running:
            ckpt.velocity = [v.copy() for v in run.velocity]
            ckpt.shuffle_state = run.batches.state
            ckpt.dropout_states = network.rng_states()
            ckpt.early_stop = run.early.to_dict()
            ckpt.curve = [row.model_dump() for row in run.curve.rows]
            ckpt.best_params = [p.copy() for p in run.best_params]
        return ckpt

    while schedule.max_epochs is None or run.epoch < schedule.max_epochs:
        epoch = run.epoch
        started = clock()
        lr, mu = lr_at(schedule, epoch), momentum_at(schedule, epoch)
        scales = network.lr_scales(schedule)

        for b, idx in enumerate(run.batches.index_batches()):
            x, y = train_set.images[idx], train_set.labels[idx]
            params = network.parameters()
            if nesterov:
                def grad_fn(point, b=b):
                    network.set_parameters(point)
                    return batch_gradients(network, x, y, epoch, b)
                params, run.velocity = nag_step(params, run.velocity,
                                                grad_fn, lr, mu, scales)
            else:
                grads = batch_gradients(network, x, y, epoch, b)
                params, run.velocity = classical_step(
                    params, run.velocity, grads, lr, mu, scales)
            network.set_parameters(params)
            network.project(schedule)
            if on_batch is not None:
                on_batch(epoch, b)

        train_report = _score(network, train_set, epoch, "train")
        val_report = _score(network, val_set, epoch, "validation")
        elapsed = clock() - started
        row = CurveRow(
            epoch=epoch, train_loss=train_report.loss,
            train_error=train_report.error, val_loss=val_report.loss,
            val_error=val_report.error, lr=lr, momentum=mu,
            seconds=elapsed if wall_clock else 0.0)
        run.curve.append(row)
        run.epoch = epoch + 1
        log.info("epoch complete", epoch=epoch, train_loss=row.train_loss,
                 train_error=row.train_error, val_loss=row.val_loss,
                 val_error=row.val_error, lr=lr, momentum=mu,
                 seconds=round(elapsed, 3))

        improved = run.early.push(val_report.error, epoch)
        if improved:
            run.best_params = network.layer_params()
            log.info("new best", epoch=epoch, val_error=val_report.error)
        if out_dir is not None:
            _write_epoch(out_dir, run, snapshot, improved)
        if on_epoch is not None:
            on_epoch(row)
        if improved and on_best is not None:
            on_best(snapshot(run.best_params, epoch + 1, False))
        if schedule.early_stop_window is not None and run.early.should_stop():
            log.info("early stop", epoch=epoch,
                     best_epoch=run.early.best_epoch,
                     best_val_error=run.early.best_error)
            stopped = True
            break

    if not run.best_params:
        run.best_params = network.layer_params()
    best_epoch = run.early.best_epoch if run.early.best_epoch is not None \
        else run.epoch - 1
    return TrainResult(
        best=snapshot(run.best_params, best_epoch + 1, False),
        last=snapshot(network.layer_params(), run.epoch, True),
        curve=run.curve, stopped_early=stopped)


def _write_epoch(out_dir: str, run: _Run, snapshot, improved: bool) -> None:
    os.makedirs(out_dir, exist_ok=True)
    run.curve.write(os.path.join(out_dir, CURVE_FILE))
    if improved:
        snapshot(run.best_params, run.epoch, False).save(
            os.path.join(out_dir, BEST_FILE))
    snapshot(run.network.layer_params(), run.epoch, True).save(
        os.path.join(out_dir, LAST_FILE))


def evaluate(checkpoint: Checkpoint, dataset: LabeledDataset,
             kernel: str = "im2col") -> LossReport:
    if dataset.stats_hash != checkpoint.stats_hash:
        raise ConfigError("dataset preprocessing does not match the "
                          "checkpoint", dataset=dataset.stats_hash[:12],
                          checkpoint=checkpoint.stats_hash[:12])
    return checkpoint.network(kernel).evaluate(dataset.images,
                                               dataset.labels)
