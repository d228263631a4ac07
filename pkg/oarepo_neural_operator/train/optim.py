#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Adam optimizer and the step-halving learning rate schedule."""

from __future__ import annotations

import dataclasses
import logging
from typing import TYPE_CHECKING

import numpy as np

from oarepo_neural_operator.errors import ConfigurationError, DimensionError, NumericalError

if TYPE_CHECKING:
    from collections.abc import Mapping, Sequence

    from oarepo_neural_operator.nop.module import Parameter

logger = logging.getLogger(__name__)


@dataclasses.dataclass
class AdamState:
    """Moment buffers keyed by parameter name."""

    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    first: dict[str, np.ndarray] = dataclasses.field(default_factory=dict)
    second: dict[str, np.ndarray] = dataclasses.field(default_factory=dict)


def learning_rate(epoch: int, initial_lr: float, halve_every: int) -> float:
    """``initial_lr * 2 ** -(epoch // halve_every)``."""
    if halve_every < 1:
        raise ConfigurationError(f"halve_every must be positive, got {halve_every}", key="train.halve_every")
    return initial_lr * 2.0 ** (-(epoch // halve_every))


def adam_step(
    params: Sequence[tuple[str, Parameter]],
    state: AdamState,
    lr: float,
    grads: Mapping[str, np.ndarray] | None = None,
    weight_decay: float = 0.0,
) -> AdamState:
    """Bias-corrected Adam update applied in place.

    Gradients default to the ``grad`` attribute of each parameter; a missing
    gradient counts as zero.

    :raises NumericalError: naming the first parameter with a non-finite gradient
    :raises DimensionError: if a gradient does not match its parameter
    """
    resolved = []
    for name, param in params:
        grad = grads.get(name) if grads is not None else param.grad
        grad = np.zeros_like(param.data) if grad is None else np.asarray(grad, dtype=np.float64)
        if grad.shape != param.shape:
            raise DimensionError("adam_step", param.shape, grad.shape, detail=name)
        if not np.all(np.isfinite(grad)):
            raise NumericalError(f"Non-finite gradient for parameter {name}")
        resolved.append((name, param, grad))

    state.step += 1
    correction1 = 1.0 - state.beta1**state.step
    correction2 = 1.0 - state.beta2**state.step
    for name, param, grad in resolved:
        if weight_decay:
            grad = grad + weight_decay * param.data
        m = state.first.get(name)
        v = state.second.get(name)
        m = (1.0 - state.beta1) * grad if m is None else state.beta1 * m + (1.0 - state.beta1) * grad
        v = (1.0 - state.beta2) * grad**2 if v is None else state.beta2 * v + (1.0 - state.beta2) * grad**2
        state.first[name], state.second[name] = m, v
        param.data = param.data - lr * (m / correction1) / (np.sqrt(v / correction2) + state.eps)
    return state
