"""Adam with bias correction, written as a pure function over named tensors."""

from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Tuple, Union

import numpy as np

from ..errors import NumericalError
from .autoencoder import AEParams

Params = Union[AEParams, Mapping[str, np.ndarray]]


@dataclass
class AdamState:
    """First/second moment accumulators and the step counter"""
    m: Dict[str, np.ndarray] = field(default_factory=OrderedDict)
    v: Dict[str, np.ndarray] = field(default_factory=OrderedDict)
    step: int = 0
    lr: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def for_params(cls, params: Params, lr: Optional[float] = None) -> "AdamState":
        if lr is None:
            lr = params.config.lr if isinstance(params, AEParams) else cls.lr
        return cls(
            m=OrderedDict((name, np.zeros_like(value)) for name, value in params.items()),
            v=OrderedDict((name, np.zeros_like(value)) for name, value in params.items()),
            lr=lr,
        )


def adam_step(params: Params, grads: Mapping[str, np.ndarray],
              state: AdamState) -> Tuple[Params, AdamState]:
    """
    One Adam update.

    Returns:
        New (params, state); the inputs are left untouched

    Raises:
        NumericalError: a gradient holds NaN or infinity (the parameter is named)
    """
    for name in params:
        if name not in grads:
            raise NumericalError(f"missing gradient for {name}")
        if grads[name].shape != params[name].shape:
            raise NumericalError(f"gradient for {name} has shape {grads[name].shape}, "
                                 f"expected {params[name].shape}")
        if not np.all(np.isfinite(grads[name])):
            raise NumericalError(f"non-finite gradient for {name} at step {state.step + 1}")

    step = state.step + 1
    correction1 = 1.0 - state.beta1 ** step
    correction2 = 1.0 - state.beta2 ** step

    new_tensors = OrderedDict()
    new_m = OrderedDict()
    new_v = OrderedDict()
    for name, value in params.items():
        g = grads[name]
        m = state.beta1 * state.m[name] + (1.0 - state.beta1) * g
        v = state.beta2 * state.v[name] + (1.0 - state.beta2) * g * g
        m_hat = m / correction1
        v_hat = v / correction2
        new_tensors[name] = value - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
        new_m[name] = m
        new_v[name] = v

    new_state = AdamState(m=new_m, v=new_v, step=step, lr=state.lr,
                          beta1=state.beta1, beta2=state.beta2, eps=state.eps)
    if isinstance(params, AEParams):
        return AEParams(config=params.config, tensors=new_tensors), new_state
    return new_tensors, new_state
