#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
from __future__ import annotations

import math
from typing import TYPE_CHECKING

import numpy as np
import pytest

from oarepo_neural_operator.grid import FieldSample, Grid
from oarepo_neural_operator.pde import Dataset
from oarepo_neural_operator.random_fields import Rng
from oarepo_neural_operator.tensor import Tensor, no_grad

if TYPE_CHECKING:
    from collections.abc import Callable


def check_gradients(
    fn: Callable[..., Tensor],
    *arrays: np.ndarray,
    eps: float = 1e-6,
    rtol: float = 1e-5,
    atol: float = 1e-8,
) -> None:
    """Compare tape gradients of ``fn`` with central finite differences.

    Entries where both gradients are below ``atol`` are compared absolutely.
    """
    tensors = [Tensor(np.array(a, dtype=np.float64), requires_grad=True) for a in arrays]
    loss = fn(*tensors)
    loss.backward()
    for t in tensors:
        analytic = t.grad if t.grad is not None else np.zeros_like(t.data)
        numeric = np.zeros_like(t.data)
        with no_grad():
            for index in np.ndindex(t.data.shape):
                original = t.data[index]
                t.data[index] = original + eps
                plus = fn(*tensors).item()
                t.data[index] = original - eps
                minus = fn(*tensors).item()
                t.data[index] = original
                numeric[index] = (plus - minus) / (2 * eps)
        small = (np.abs(analytic) < atol) & (np.abs(numeric) < atol)
        scale = np.maximum(np.abs(analytic), np.abs(numeric))
        relative = np.where(small, 0.0, np.abs(analytic - numeric) / np.where(small, 1.0, scale))
        assert relative.max(initial=0.0) < rtol, f"gradient mismatch {relative.max():.3e}"


@pytest.fixture
def gradcheck():
    return check_gradients


@pytest.fixture
def rng():
    return Rng(1234)


@pytest.fixture
def periodic_grid_1d():
    return Grid.uniform(64, dims=1, extent=(0.0, 1.0), periodic=True)


@pytest.fixture
def periodic_grid_2d():
    return Grid.uniform(16, dims=2, extent=(0.0, 1.0), periodic=True)


def band_limited_values(grid: Grid, modes: int = 3, shift: float = 0.0) -> np.ndarray:
    """Smooth periodic test function with frequencies below ``modes``."""
    x = grid.coordinates()
    values = np.full(grid.sizes, shift)
    for k in range(1, modes):
        phase = sum(x[..., j] for j in range(grid.dims))
        values = values + math.cos(k) * np.sin(2 * np.pi * k * phase) / k
    return values


@pytest.fixture
def linear_dataset(periodic_grid_1d):
    """Pairs ``(a, 3a)`` for smooth periodic ``a``."""
    rng = Rng(7)
    x = periodic_grid_1d.coordinates()[..., 0]
    inputs, outputs = [], []
    for _ in range(12):
        c = rng.normal(4)
        a = c[0] * np.sin(2 * np.pi * x) + c[1] * np.cos(2 * np.pi * x) + c[2] * np.sin(4 * np.pi * x) + c[3]
        inputs.append(FieldSample(periodic_grid_1d, a))
        outputs.append(FieldSample(periodic_grid_1d, 3 * a))
    return Dataset(inputs, outputs, {"problem": "linear"})


@pytest.fixture
def band_limited():
    return band_limited_values
