"""
Momentum SGD updates over lists of parameter tensors.

Every parameter tensor belongs to a group whose learning rate is
``lr * scale``; convolutional groups use ``conv_grad_scale`` for both
weights and biases, dense groups use 1.
"""
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from ..utils.errors import DimensionError

GradFn = Callable[[List[np.ndarray]], List[np.ndarray]]


def zero_velocity(params: Sequence[np.ndarray]) -> List[np.ndarray]:
    return [np.zeros_like(p) for p in params]


def _check(params: Sequence[np.ndarray], velocity: Sequence[np.ndarray],
           scales: Optional[Sequence[float]]) -> List[float]:
    if len(params) != len(velocity):
        raise DimensionError("one velocity tensor per parameter expected",
                             params=len(params), velocity=len(velocity))
    for i, (p, v) in enumerate(zip(params, velocity)):
        if p.shape != v.shape:
            raise DimensionError("velocity shape does not match parameter",
                                 index=i, param=p.shape, velocity=v.shape)
    if scales is None:
        return [1.0] * len(params)
    if len(scales) != len(params):
        raise DimensionError("one scale per parameter expected",
                             params=len(params), scales=len(scales))
    return list(scales)


def _apply(params: Sequence[np.ndarray], velocity: Sequence[np.ndarray],
           grads: Sequence[np.ndarray], lr: float, mu: float,
           scales: List[float]) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    if len(grads) != len(params):
        raise DimensionError("one gradient per parameter expected",
                             params=len(params), grads=len(grads))
    new_params, new_velocity = [], []
    for i, (p, v, g, s) in enumerate(zip(params, velocity, grads, scales)):
        if g.shape != p.shape:
            raise DimensionError("gradient shape does not match parameter",
                                 index=i, param=p.shape, grad=g.shape)
        v_next = mu * v - (lr * s) * g
        new_velocity.append(v_next)
        new_params.append(p + v_next)
    return new_params, new_velocity


def nag_step(params: Sequence[np.ndarray], velocity: Sequence[np.ndarray],
             grad_fn: GradFn, lr: float, mu: float,
             scales: Optional[Sequence[float]] = None
             ) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    """One Nesterov step.

    ``grad_fn`` is called once with the lookahead point ``p + mu * v``;
    then ``v' = mu * v - lr * scale * g`` and ``p' = p + v'``. Inputs are
    not modified.
    """
    scales = _check(params, velocity, scales)
    lookahead = [p + mu * v for p, v in zip(params, velocity)]
    grads = grad_fn(lookahead)
    return _apply(params, velocity, grads, lr, mu, scales)


def classical_step(params: Sequence[np.ndarray],
                   velocity: Sequence[np.ndarray],
                   grads: Sequence[np.ndarray], lr: float, mu: float,
                   scales: Optional[Sequence[float]] = None
                   ) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    scales = _check(params, velocity, scales)
    return _apply(params, velocity, grads, lr, mu, scales)
