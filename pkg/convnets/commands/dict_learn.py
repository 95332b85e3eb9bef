import os

import numpy as np
from rich import print

from ..config import RunConfig
from ..output_formatting import dictionary_table
from ..preprocess import Dictionary, encode, extract_patches, learn_dictionary
from .common import load_prepared_set

DICTIONARY_FILE = "dictionary.bin"


class dictionary_learning:
    """Learns a spherical K-means patch dictionary from the prepared
    training images and reports its column norms and code sparsity."""

    def __init__(self, config: RunConfig) -> None:
        self.config: RunConfig = config
        self.path: str = os.path.join(config.out_dir, DICTIONARY_FILE)
        self.dictionary: Dictionary = None
        self.sparsity: float = 0.0
        self.main_process()

    def main_process(self) -> None:
        cfg = self.config
        train = load_prepared_set(cfg, "train")
        patches = extract_patches(train.images, cfg.patch_size,
                                  cfg.n_patches, cfg.seed)
        self.dictionary = learn_dictionary(
            patches, cfg.n_centroids, cfg.kmeans_iters, cfg.seed, cfg.alpha,
            cfg.patch_size, train.images.shape[1])
        codes = encode(self.dictionary, patches)
        self.sparsity = float(np.mean(codes == 0.0))

        os.makedirs(cfg.out_dir, exist_ok=True)
        self.dictionary.save(self.path)
        print(dictionary_table(self.dictionary.column_norms(), self.sparsity,
                               cfg.alpha, cfg.patch_size,
                               self.dictionary.channels))
        print(f"Dictionary saved to: {self.path}")
