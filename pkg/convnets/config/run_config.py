"""
Run configuration: one flat ``key = value`` file per experiment.

    # comments and blank lines are ignored
    train_paths = data/data_batch_1.bin, data/data_batch_2.bin
    pipeline = gcn-zca
    model = model1
    variant = dropout
    base_lr = 0.17
    layer = input shape=3,32,32
    layer = conv maps=64 kernel=5

Schedule fields (``base_lr``, ``max_norm``, ...) are written flat next to
the run fields. Repeated ``layer`` lines describe an inline model and take
precedence over ``model``. ``none`` clears an optional value.
"""
import hashlib
import os
from typing import Any, Dict, List, Literal, Optional, Tuple, get_args

import structlog
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..model_zoo import LayerSpec, ModelSpec, builtin, infer_shapes
from ..model_zoo import model_from_layers
from ..optimizer import SCHEDULE_PRESETS, TrainSchedule
from ..preprocess import PipelineSpec
from ..tensor_core.serialization import canonical_json
from ..utils.errors import ConfigError

log = structlog.get_logger(__name__)

PAIRED_KEYS = ("kernel", "region")
RUN_METADATA_FILE = "run.json"


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    train_paths: List[str] = []
    test_paths: List[str] = []
    train_fraction: float = Field(default=0.9, gt=0, lt=1)
    split_seed: int = 0
    subset: Optional[int] = Field(default=None, gt=0)
    pipeline: str = "gcn-zca"
    rescale_order: Literal["none", "before", "after"] = "none"
    fudge: float = Field(default=0.01, ge=0)
    model: str = "model1"
    variant: str = "plain"
    activation: Optional[str] = None
    map_scale: float = Field(default=1.0, gt=0)
    unit_scale: float = Field(default=1.0, gt=0)
    max_maps: Optional[int] = Field(default=None, gt=0)
    max_units: Optional[int] = Field(default=None, gt=0)
    conv_dropout: bool = False
    layers: Optional[List[LayerSpec]] = None
    schedule_preset: Literal["default", "baseline", "initial_cnn"] = "default"
    schedule: TrainSchedule = TrainSchedule()
    seed: int = 0
    out_dir: str = "runs"
    prepared_dir: Optional[str] = None
    dtype: Literal["float64", "float32"] = "float64"
    kernel: Literal["im2col", "direct"] = "im2col"
    wall_clock: bool = False
    patch_size: int = Field(default=6, gt=0)
    n_centroids: int = Field(default=400, gt=0)
    kmeans_iters: int = Field(default=10, gt=0)
    alpha: float = Field(default=0.25, ge=0)
    n_patches: int = Field(default=10000, gt=0)
    pca_sample_cap: int = Field(default=10000, gt=1)

    @property
    def prepared_path(self) -> str:
        return self.prepared_dir or os.path.join(self.out_dir, "prepared")

    def pipeline_spec(self) -> PipelineSpec:
        return PipelineSpec.from_name(self.pipeline, self.rescale_order,
                                      self.fudge)

    def image_shape(self) -> Tuple[int, int, int]:
        return (1, 32, 32) if self.pipeline_spec().gray else (3, 32, 32)

    def model_spec(self) -> ModelSpec:
        if self.layers:
            spec = model_from_layers("inline", self.layers)
            infer_shapes(spec)
            return spec
        return builtin(self.model, self.variant, activation=self.activation,
                       map_scale=self.map_scale, unit_scale=self.unit_scale,
                       max_maps=self.max_maps, max_units=self.max_units,
                       conv_dropout=self.conv_dropout,
                       input_shape=self.image_shape())

    def resolved_hash(self) -> str:
        """SHA-256 of the canonical resolved config.

        Output locations and the epoch cap do not change what a run
        computes and are left out, so a resumed run may extend training.
        """
        data = self.model_dump(mode="json", exclude={
            "out_dir": True, "prepared_dir": True, "wall_clock": True,
            "schedule": {"max_epochs"}})
        return hashlib.sha256(canonical_json(data).encode("utf-8")).hexdigest()

    def metadata(self) -> Dict[str, Any]:
        return {"config": self.model_dump(mode="json"),
                "config_hash": self.resolved_hash(),
                "seed": self.seed, "split_seed": self.split_seed}


def _nullable(model, key: str) -> bool:
    return type(None) in get_args(model.model_fields[key].annotation)


def _value(model, key: str, raw: str) -> Any:
    if raw.lower() == "none" and _nullable(model, key):
        return None
    annotation = str(model.model_fields[key].annotation)
    if "List" in annotation or "list" in annotation:
        return [part.strip() for part in raw.split(",") if part.strip()]
    return raw


def _layer(raw: str, lineno: int) -> Dict[str, Any]:
    kind, *pairs = raw.split()
    layer: Dict[str, Any] = {"kind": kind}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"line {lineno}: expected key=value in layer, "
                              f"got '{pair}'")
        key, value = pair.split("=", 1)
        parts = value.split(",")
        if key in PAIRED_KEYS and len(parts) == 1:
            parts = parts * 2
        layer[key] = parts if len(parts) > 1 or key == "shape" else value
    return layer


def parse_run_config(text: str, overrides: Optional[Dict[str, Any]] = None
                     ) -> RunConfig:
    """Parse config text; ``overrides`` (flat keys) win over the file."""
    run: Dict[str, Any] = {}
    schedule: Dict[str, Any] = {}
    layers: List[Dict[str, Any]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'",
                              line=line)
        key, raw = (part.strip() for part in line.split("=", 1))
        if key == "layer":
            layers.append(_layer(raw, lineno))
        elif key in TrainSchedule.model_fields:
            schedule[key] = _value(TrainSchedule, key, raw)
        elif key in RunConfig.model_fields and key not in ("schedule",
                                                           "layers"):
            run[key] = _value(RunConfig, key, raw)
        else:
            raise ConfigError(f"line {lineno}: unknown key '{key}'")

    for key, value in (overrides or {}).items():
        if value is None:
            continue
        (schedule if key in TrainSchedule.model_fields else run)[key] = value
    if layers:
        run["layers"] = layers
    return build_run_config(run, schedule)


def build_run_config(run: Dict[str, Any],
                     schedule: Dict[str, Any]) -> RunConfig:
    preset = run.get("schedule_preset", "default")
    if preset not in SCHEDULE_PRESETS:
        raise ConfigError(f"unknown schedule preset: {preset}",
                          valid=", ".join(SCHEDULE_PRESETS))
    try:
        base = SCHEDULE_PRESETS[preset]().model_dump()
        base.update(schedule)
        config = RunConfig(schedule=TrainSchedule(**base), **run)
    except ValidationError as e:
        raise ConfigError(f"invalid run config: {e}") from e
    config.pipeline_spec()
    return config


def load_run_config(path: Optional[str],
                    overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    if path is None:
        return parse_run_config("", overrides)
    try:
        with open(path) as f:
            text = f.read()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}")
    config = parse_run_config(text, overrides)
    log.info("config loaded", path=path, config_hash=config.resolved_hash())
    return config
