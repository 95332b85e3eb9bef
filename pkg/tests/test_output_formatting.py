import os

import numpy as np
from rich.console import Console
from rich.table import Table

from convnets.model_zoo import builtin
from convnets.objective import LossReport
from convnets.optimizer import TrainSchedule
from convnets.output_formatting import (ArchitectureGraphPlot,
                                        comparison_table, curve_table,
                                        dataset_table, dictionary_table,
                                        gradcheck_table, loss_report_table,
                                        schedule_table, shape_chain_table)
from convnets.trainer import CurveRow, GradcheckReport, LearningCurve
from convnets.trainer.gradcheck import TensorCheck


def rendered(table: Table) -> str:
    console = Console(width=200, record=True, color_system=None)
    console.print(table)
    return console.export_text()


def curve(errors):
    return LearningCurve(rows=[
        CurveRow(epoch=i + 1, train_loss=1.0, train_error=0.5, val_loss=1.0,
                 val_error=e, lr=0.1, momentum=0.5, seconds=0.0)
        for i, e in enumerate(errors)])


class TestTables:
    def test_shape_chain(self):
        spec = builtin("baseline")
        table = shape_chain_table(spec)
        assert table.row_count == len(spec.layers) + 1
        text = rendered(table)
        assert "dense 1000" in text
        assert str(3072 * 1000 + 1000 + 1000 * 10 + 10) in text

    def test_schedule(self):
        schedule = TrainSchedule()
        table = schedule_table(schedule, epochs=(0, 500))
        assert table.row_count == len(schedule.model_dump()) + 2
        assert "0.0017" in rendered(table)

    def test_curve_keeps_last_rows(self):
        assert curve_table(curve([0.5] * 15), last=4).row_count == 4

    def test_loss_report(self):
        report = LossReport(loss=0.5, error=0.25, count=8)
        text = rendered(loss_report_table({"validation": report}))
        assert "0.2500" in text and "0.7500" in text

    def test_dataset_counts(self, small_dataset):
        text = rendered(dataset_table({"train": small_dataset}))
        assert "airplane" in text and "truck" in text

    def test_gradcheck_marks_failures(self):
        report = GradcheckReport(model="m", tolerance=1e-4, tensors=[
            TensorCheck(name="layer1.dense.weights", max_rel_error=1e-7,
                        checked=20, skipped_kinks=0, passed=True),
            TensorCheck(name="input", max_rel_error=0.3, checked=20,
                        skipped_kinks=2, passed=False)])
        table = gradcheck_table([report])
        assert table.row_count == 2
        assert "FAIL" in rendered(table)

    def test_comparison_best_epoch(self):
        text = rendered(comparison_table({"relu": curve([0.6, 0.3, 0.4])}))
        assert "0.3000" in text

    def test_dictionary(self):
        table = dictionary_table(np.ones(16), 0.75, 0.25, 6, 3)
        assert "3x6x6" in rendered(table)


class TestArchitecturePlot:
    def test_source_has_every_layer(self, tmp_path):
        spec = builtin("initial_cnn")
        plot = ArchitectureGraphPlot(spec, str(tmp_path))
        assert plot.dot.source.count("->") == len(spec.layers) - 1
        assert "conv 6 5x5" in plot.dot.source

    def test_render_always_writes_source(self, tmp_path):
        out_dir = os.path.join(str(tmp_path), "plots")
        plot = ArchitectureGraphPlot(builtin("model1"), out_dir, "m1")
        assert isinstance(plot.render(), bool)
        assert plot.source_path == os.path.join(out_dir, "m1.gv")
        with open(plot.source_path) as f:
            assert "maxpool" in f.read()
