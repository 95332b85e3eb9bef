"""
Finite-difference gradient checks of whole networks.

Each checked coordinate is moved by +h and -h; the central difference of
the mean train-mode loss is compared with the backpropagated gradient.
Dropout masks are frozen for the duration. A coordinate whose
perturbation flips any discrete decision (a ReLU sign, a pooling or
maxout winner) straddles a kink and is replaced by another coordinate.
"""
from typing import Callable, List, Optional, Tuple

import numpy as np
import structlog
from pydantic import BaseModel

from ..layers import softmax
from ..model_zoo import InitPolicy, ModelSpec, Network, initialize
from ..objective import sample_losses, softmax_xent_backward
from ..optimizer import TrainSchedule

log = structlog.get_logger(__name__)

DEFAULT_TOLERANCE = 1e-4
DEFAULT_STEP = 1e-5
KINK_TOLERANCE = 1e-6
# Gradients below this magnitude are compared absolutely; central
# differences carry ~1e-11 of rounding noise.
GRADIENT_FLOOR = 1e-4


class TensorCheck(BaseModel):
    name: str
    max_rel_error: float
    checked: int
    skipped_kinks: int
    passed: bool


class GradcheckReport(BaseModel):
    model: str
    tolerance: float
    tensors: List[TensorCheck]
    resamples: int = 0

    @property
    def passed(self) -> bool:
        return all(t.passed for t in self.tensors)

    @property
    def max_rel_error(self) -> float:
        return max((t.max_rel_error for t in self.tensors), default=0.0)

    def custom_output(self) -> dict:
        return {"model": self.model, "passed": self.passed,
                "max_rel_error": self.max_rel_error,
                "tensors": {t.name: t.max_rel_error for t in self.tensors}}


def relative_error(analytic: float, numeric: float,
                   floor: float = GRADIENT_FLOOR) -> float:
    return abs(analytic - numeric) / max(abs(analytic) + abs(numeric), floor)


def _same(a: List[np.ndarray], b: List[np.ndarray]) -> bool:
    return len(a) == len(b) and all(np.array_equal(u, v)
                                    for u, v in zip(a, b))


def _tensor_names(network: Network) -> List[str]:
    names = []
    for index in network.spec.parametric():
        kind = network.spec.layers[index].kind
        names += [f"layer{index}.{kind}.weights", f"layer{index}.{kind}.biases"]
    return names


def _check_tensor(name: str, target: np.ndarray, analytic: np.ndarray,
                  loss: Callable[[], Tuple[float, List[np.ndarray]]],
                  base: List[np.ndarray], rng: np.random.Generator,
                  max_coords: int, h: float, tolerance: float) -> TensorCheck:
    flat, grad = target.reshape(-1), analytic.reshape(-1)
    worst, checked, kinks = 0.0, 0, 0
    for coord in rng.permutation(flat.size):
        if checked >= max_coords:
            break
        original = flat[coord]
        flat[coord] = original + h
        f_plus, d_plus = loss()
        flat[coord] = original - h
        f_minus, d_minus = loss()
        flat[coord] = original
        if not (_same(d_plus, base) and _same(d_minus, base)):
            kinks += 1
            continue
        numeric = (f_plus - f_minus) / (2.0 * h)
        worst = max(worst, relative_error(float(grad[coord]), numeric))
        checked += 1
    result = TensorCheck(name=name, max_rel_error=worst, checked=checked,
                         skipped_kinks=kinks,
                         passed=checked > 0 and worst < tolerance)
    log.debug("gradcheck tensor", tensor=name, max_rel_error=worst,
              checked=checked, skipped_kinks=kinks)
    return result


def gradcheck_network(network: Network, x: np.ndarray, labels: np.ndarray,
                      tolerance: float = DEFAULT_TOLERANCE,
                      h: float = DEFAULT_STEP, max_coords: int = 20,
                      seed: int = 0, check_input: bool = True
                      ) -> GradcheckReport:
    """Check every parameter tensor (and the input) of ``network`` on one
    batch. The network's parameters are left as they were."""
    rng = np.random.default_rng(seed)
    x = np.array(x, dtype=np.float64)
    network.logits(x, train=True)
    network.freeze_dropout()
    try:
        z = network.logits(x, train=True)
        d_input = network.backward(softmax_xent_backward(z, labels))
        grads = network.gradients()
        base = network.decisions()
        params = [p.copy() for p in network.parameters()]
        network.set_parameters(params)

        def loss() -> Tuple[float, List[np.ndarray]]:
            probs = softmax(network.logits(x, train=True))
            return (float(np.mean(sample_losses(probs, labels))),
                    network.decisions())

        checks = [_check_tensor(name, p, g, loss, base, rng, max_coords, h,
                                tolerance)
                  for name, p, g in zip(_tensor_names(network), params,
                                        grads)]
        if check_input:
            checks.append(_check_tensor("input", x, d_input, loss, base,
                                        rng, max_coords, h, tolerance))
    finally:
        network.unfreeze_dropout()
    return GradcheckReport(model=network.spec.name, tolerance=tolerance,
                           tensors=checks)


def gradcheck(spec: ModelSpec, seed: int = 0,
              tolerance: float = DEFAULT_TOLERANCE, h: float = DEFAULT_STEP,
              max_coords: int = 20, batch: int = 2,
              kink_tolerance: float = KINK_TOLERANCE, max_resamples: int = 10,
              kernel: str = "im2col",
              schedule: Optional[TrainSchedule] = None) -> GradcheckReport:
    """Gradient check of a freshly initialized, max-norm projected
    instance of ``spec`` on random inputs.

    Inputs are redrawn while the forward pass sits closer than
    ``kink_tolerance`` to a ReLU, pooling or maxout kink.
    """
    params = initialize(spec, InitPolicy(seed=seed))
    network = Network(spec, params, dropout_seed=seed, kernel=kernel)
    network.project(schedule or TrainSchedule())
    rng = np.random.default_rng(seed)
    resamples = 0
    while True:
        x = rng.standard_normal((batch,) + spec.input_shape)
        labels = rng.integers(0, spec.classes, size=batch)
        network.logits(x, train=True)
        if network.kink_margin() >= kink_tolerance \
                or resamples >= max_resamples:
            break
        resamples += 1
    report = gradcheck_network(network, x, labels, tolerance, h, max_coords,
                               seed)
    report.resamples = resamples
    log.info("gradcheck", model=spec.name, passed=report.passed,
             max_rel_error=report.max_rel_error, resamples=resamples)
    return report
