#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Relative L2 and mean squared error losses."""

from __future__ import annotations

from typing import TYPE_CHECKING, Any

import numpy as np

from oarepo_neural_operator.errors import ConfigurationError, DimensionError, DomainError
from oarepo_neural_operator.tensor import Tensor, as_tensor, ops

if TYPE_CHECKING:
    from collections.abc import Callable

    from oarepo_neural_operator.grid import FieldSample, Grid
    from oarepo_neural_operator.nop.models import OperatorModel

# keeps the square root differentiable when prediction and truth coincide
_SQRT_FLOOR = 1e-300


def _truth_norms(truth: np.ndarray) -> np.ndarray:
    norms = np.sqrt(np.sum(truth.reshape(truth.shape[0], -1) ** 2, axis=1))
    if np.any(norms == 0.0):
        zero = np.flatnonzero(norms == 0.0).tolist()
        raise DomainError(f"Relative error undefined for identically zero truth (samples {zero})")
    return norms


def relative_l2_values(pred: Any, truth: Any) -> np.ndarray:
    """Per-sample ``||pred - truth|| / ||truth||`` over all non-batch axes."""
    pred, truth = np.asarray(pred, dtype=np.float64), np.asarray(truth, dtype=np.float64)
    if pred.shape != truth.shape:
        raise DimensionError("relative_l2", pred.shape, truth.shape)
    diff = np.sqrt(np.sum((pred - truth).reshape(pred.shape[0], -1) ** 2, axis=1))
    return diff / _truth_norms(truth)


def relative_l2(pred: FieldSample, truth: FieldSample) -> float:
    """Relative L2 error of one predicted field.

    :raises ConfigurationError: if the fields live on different grids
    :raises DomainError: if ``truth`` is identically zero
    """
    if pred.grid != truth.grid:
        raise ConfigurationError(f"Cannot compare fields on grids {pred.grid.sizes} and {truth.grid.sizes}")
    return float(relative_l2_values(pred.values[None], truth.values[None])[0])


def relative_l2_loss(pred: Tensor, truth: Any) -> Tensor:
    """Differentiable mean over the batch of per-sample relative L2 errors."""
    pred = as_tensor(pred)
    truth = np.asarray(truth, dtype=np.float64)
    if pred.shape != truth.shape:
        raise DimensionError("relative_l2_loss", pred.shape, truth.shape)
    batch = pred.shape[0]
    squared = ops.reduce_sum(ops.reshape(pred - truth, (batch, -1)) ** 2, axis=1)
    return ops.reduce_mean(ops.sqrt(squared + _SQRT_FLOOR) / _truth_norms(truth))


def mse_loss(pred: Tensor, truth: Any) -> Tensor:
    """Mean squared error over all entries."""
    pred = as_tensor(pred)
    truth = np.asarray(truth, dtype=np.float64)
    if pred.shape != truth.shape:
        raise DimensionError("mse_loss", pred.shape, truth.shape)
    return ops.reduce_mean((pred - truth) ** 2)


LOSSES: dict[str, Callable[[Tensor, Any], Tensor]] = {
    "relative_l2": relative_l2_loss,
    "mse": mse_loss,
}


def get_loss(name: str) -> Callable[[Tensor, Any], Tensor]:
    """Look up a loss by name."""
    try:
        return LOSSES[name]
    except KeyError:
        raise ConfigurationError(f"Unknown loss '{name}', expected one of {sorted(LOSSES)}", key="train.loss") from None


def dataset_errors(
    model: OperatorModel, inputs: np.ndarray, outputs: np.ndarray, grid: Grid, batch_size: int = 20
) -> np.ndarray:
    """Per-sample relative L2 errors of ``model`` without recording gradients."""
    errors = []
    for start in range(0, len(inputs), batch_size):
        pred = model.predict_batch(inputs[start : start + batch_size], grid, steps=outputs.shape[-1])
        errors.append(relative_l2_values(pred, outputs[start : start + batch_size]))
    return np.concatenate(errors) if errors else np.zeros(0)
