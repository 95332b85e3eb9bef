"""
Training snapshots in the tensor bundle container.

Tensors are stored as ``param.<i>.weights`` / ``param.<i>.biases``,
``velocity.<j>`` and, for running checkpoints, ``best.<i>.*``; everything
else goes into the bundle's JSON metadata.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
import structlog

from ..layers import LayerParams
from ..model_zoo import ModelSpec, Network
from ..tensor_core import load_bundle, save_bundle
from ..utils.errors import DataError

log = structlog.get_logger(__name__)

CHECKPOINT_KIND = "checkpoint"


def _params_tensors(prefix: str, params: List[LayerParams]
                    ) -> Dict[str, np.ndarray]:
    tensors = {}
    for i, p in enumerate(params):
        tensors[f"{prefix}.{i}.weights"] = p.weights
        tensors[f"{prefix}.{i}.biases"] = p.biases
    return tensors


def _params_from(prefix: str, tensors: Dict[str, np.ndarray],
                 count: int) -> List[LayerParams]:
    return [LayerParams(tensors[f"{prefix}.{i}.weights"],
                        tensors[f"{prefix}.{i}.biases"])
            for i in range(count)]


@dataclass
class Checkpoint:
    """Everything needed to evaluate a network or continue training it.

    ``epoch`` counts completed epochs. Running checkpoints carry the
    optimizer velocity, the RNG states and the early-stop window; best
    snapshots may leave them empty.
    """

    spec: ModelSpec
    params: List[LayerParams]
    epoch: int
    config_hash: str = ""
    stats_hash: str = ""
    velocity: List[np.ndarray] = field(default_factory=list)
    shuffle_state: Optional[Dict[str, Any]] = None
    dropout_states: List[Dict[str, Any]] = field(default_factory=list)
    early_stop: Optional[Dict[str, Any]] = None
    curve: List[Dict[str, Any]] = field(default_factory=list)
    best_params: List[LayerParams] = field(default_factory=list)
    schedule: Optional[Dict[str, Any]] = None
    class_names: List[str] = field(default_factory=list)

    def network(self, kernel: str = "im2col", dtype=np.float64) -> Network:
        return Network(self.spec, self.params, kernel=kernel, dtype=dtype)

    def save(self, path: str) -> None:
        tensors = _params_tensors("param", self.params)
        tensors.update(_params_tensors("best", self.best_params))
        for j, v in enumerate(self.velocity):
            tensors[f"velocity.{j}"] = v
        meta = {
            "kind": CHECKPOINT_KIND,
            "spec": self.spec.model_dump(mode="json"),
            "epoch": self.epoch,
            "layers": len(self.params),
            "best_layers": len(self.best_params),
            "velocity": len(self.velocity),
            "config_hash": self.config_hash,
            "stats_hash": self.stats_hash,
            "shuffle_state": self.shuffle_state,
            "dropout_states": self.dropout_states,
            "early_stop": self.early_stop,
            "curve": self.curve,
            "schedule": self.schedule,
            "class_names": self.class_names,
        }
        save_bundle(path, tensors, meta)
        log.info("checkpoint written", path=path, epoch=self.epoch)

    @classmethod
    def load(cls, path: str) -> "Checkpoint":
        tensors, meta = load_bundle(path)
        if meta.get("kind") != CHECKPOINT_KIND:
            raise DataError(f"{path} is not a checkpoint")
        try:
            return cls(
                spec=ModelSpec.model_validate(meta["spec"]),
                params=_params_from("param", tensors, meta["layers"]),
                epoch=meta["epoch"],
                config_hash=meta["config_hash"],
                stats_hash=meta["stats_hash"],
                velocity=[tensors[f"velocity.{j}"]
                          for j in range(meta["velocity"])],
                shuffle_state=meta["shuffle_state"],
                dropout_states=meta["dropout_states"],
                early_stop=meta["early_stop"],
                curve=meta["curve"],
                best_params=_params_from("best", tensors,
                                         meta["best_layers"]),
                schedule=meta["schedule"],
                class_names=meta["class_names"],
            )
        except KeyError as e:
            raise DataError(f"checkpoint {path} is missing {e}")
