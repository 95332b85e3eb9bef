from typing import Dict, List, Sequence

import numpy as np
from rich.table import Table

from ..dataset_io import LabeledDataset, class_counts
from ..model_zoo import ModelSpec, infer_shapes, param_shapes
from ..objective import LossReport
from ..optimizer import TrainSchedule, lr_at, momentum_at
from ..trainer import GradcheckReport, LearningCurve


def _table(*columns: str) -> Table:
    table = Table(show_header=True, header_style="bold magenta")
    for i, name in enumerate(columns):
        table.add_column(name, style="cyan" if i == 0 else None)
    return table


def shape_chain_table(spec: ModelSpec) -> Table:
    table = _table("#", "Layer", "Output", "Params")
    table.title = spec.name
    chain = infer_shapes(spec)
    counts = dict(zip(spec.parametric(),
                      (int(np.prod(w)) + int(np.prod(b))
                       for w, b in param_shapes(spec))))
    for index, (layer, shape) in enumerate(zip(spec.layers, chain)):
        table.add_row(str(index), layer.describe(),
                      "x".join(str(d) for d in shape),
                      str(counts.get(index, "")))
    table.add_row("", "total", "", str(sum(counts.values())))
    return table


def schedule_table(schedule: TrainSchedule,
                   epochs: Sequence[int] = (0, 100, 250, 400, 500)) -> Table:
    table = _table("Setting", "Value")
    for key, value in schedule.model_dump().items():
        table.add_row(key, str(value))
    for epoch in epochs:
        table.add_row(f"lr / momentum @ {epoch}",
                      f"{lr_at(schedule, epoch):.6g} / "
                      f"{momentum_at(schedule, epoch):.4g}")
    return table


def curve_table(curve: LearningCurve, last: int = 10) -> Table:
    table = _table("Epoch", "Train loss", "Train err", "Val loss", "Val err",
                   "LR", "Momentum")
    for row in curve.rows[-last:]:
        table.add_row(str(row.epoch), f"{row.train_loss:.4f}",
                      f"{row.train_error:.4f}", f"{row.val_loss:.4f}",
                      f"{row.val_error:.4f}", f"{row.lr:.5g}",
                      f"{row.momentum:.4g}")
    return table


def loss_report_table(reports: Dict[str, LossReport]) -> Table:
    table = _table("Set", "Samples", "Loss", "Misclassification",
                   "Accuracy")
    for name, report in reports.items():
        table.add_row(name, str(report.count), f"{report.loss:.4f}",
                      f"{report.error:.4f}", f"{report.accuracy:.4f}")
    return table


def dataset_table(sets: Dict[str, LabeledDataset]) -> Table:
    first = next(iter(sets.values()))
    table = _table("Set", "Samples", "Pipeline", *first.class_names)
    for name, ds in sets.items():
        table.add_row(name, str(len(ds)), ds.pipeline,
                      *(str(c) for c in class_counts(ds)))
    return table


def gradcheck_table(reports: List[GradcheckReport]) -> Table:
    table = _table("Model", "Tensor", "Checked", "Kinks skipped",
                   "Max rel. error", "Result")
    for report in reports:
        for check in report.tensors:
            table.add_row(report.model, check.name, str(check.checked),
                          str(check.skipped_kinks),
                          f"{check.max_rel_error:.2e}",
                          "[green]pass" if check.passed else "[red]FAIL")
    return table


def comparison_table(results: Dict[str, LearningCurve]) -> Table:
    table = _table("Run", "Epochs", "Best val err", "Best epoch",
                   "Final train err")
    for name, curve in results.items():
        best = min(curve.rows, key=lambda r: r.val_error)
        table.add_row(name, str(len(curve)), f"{best.val_error:.4f}",
                      str(best.epoch), f"{curve.rows[-1].train_error:.4f}")
    return table


def dictionary_table(norms: np.ndarray, sparsity: float, alpha: float,
                     patch_size: int, channels: int) -> Table:
    table = _table("Property", "Value")
    table.add_row("centroids", str(norms.size))
    table.add_row("patch", f"{channels}x{patch_size}x{patch_size}")
    table.add_row("alpha", f"{alpha:g}")
    table.add_row("column norm min / max",
                  f"{norms.min():.10f} / {norms.max():.10f}")
    table.add_row("zero code fraction", f"{sparsity:.4f}")
    return table
