import json
import os
from typing import Dict

from ..config import RUN_METADATA_FILE, RunConfig
from ..dataset_io import LabeledDataset, load_prepared
from ..tensor_core import atomic_write_bytes
from ..utils.errors import ConfigError, DataError

PREPARED_FILES: Dict[str, str] = {
    "train": "train.prep",
    "validation": "validation.prep",
    "test": "test.prep",
}
STATS_FILE = "stats.bin"


def prepared_file(config: RunConfig, name: str) -> str:
    if name not in PREPARED_FILES:
        raise ConfigError(f"unknown prepared set: {name}",
                          valid=", ".join(PREPARED_FILES))
    return os.path.join(config.prepared_path, PREPARED_FILES[name])


def load_prepared_set(config: RunConfig, name_or_path: str) -> LabeledDataset:
    path = (prepared_file(config, name_or_path)
            if name_or_path in PREPARED_FILES else name_or_path)
    if not os.path.exists(path):
        raise DataError(f"prepared data not found: {path}; run 'prepare' "
                        f"first")
    return load_prepared(path)


def check_pipeline(config: RunConfig, ds: LabeledDataset) -> None:
    expected = config.pipeline_spec().label
    if ds.pipeline != expected:
        raise ConfigError("prepared data uses a different pipeline",
                          prepared=ds.pipeline, config=expected)


def write_run_metadata(config: RunConfig, out_dir: str, **extra) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, RUN_METADATA_FILE)
    data = dict(config.metadata(), **extra)
    atomic_write_bytes(path, (json.dumps(data, indent=2, sort_keys=True)
                              + "\n").encode("utf-8"))
    return path
