import os

from rich import print

from ..config import RunConfig
from ..dataset_io import pca2, write_scatter
from .common import load_prepared_set
from .prepare import load_raw

SCATTER_FILE = "pca2.csv"


class pca_projection:
    """Projects a dataset onto its two leading principal components and
    writes the ``x,y,label`` scatter."""

    def __init__(self, config: RunConfig, data: str = "raw",
                 output: str = "") -> None:
        self.config: RunConfig = config
        self.data: str = data
        self.output: str = output or os.path.join(config.out_dir,
                                                  SCATTER_FILE)
        self.main_process()

    def main_process(self) -> None:
        if self.data == "raw":
            dataset, _ = load_raw(self.config, with_test=False)
        else:
            dataset = load_prepared_set(self.config, self.data)
        points, labels = pca2(dataset, self.config.pca_sample_cap,
                              self.config.seed)
        os.makedirs(os.path.dirname(os.path.abspath(self.output)),
                    exist_ok=True)
        write_scatter(points, labels, dataset.class_names, self.output)
        print(f"PCA scatter of {len(labels)} images saved to: {self.output}")
