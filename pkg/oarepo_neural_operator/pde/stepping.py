#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Helpers shared by the pseudo-spectral time steppers."""

from __future__ import annotations

import math

import numpy as np

from oarepo_neural_operator.errors import ConfigurationError, SolverError


def step_count(duration: float, dt: float) -> tuple[int, float]:
    """Number of steps covering ``duration`` and the adjusted step size."""
    if dt <= 0:
        raise ConfigurationError(f"Time step must be positive, got {dt}", key="dt")
    if duration < 0:
        raise ConfigurationError(f"Integration time must be nonnegative, got {duration}", key="t_end")
    if duration == 0:
        return 0, dt
    n = max(1, math.ceil(duration / dt - 1e-9))
    return n, duration / n


def integer_wavenumbers(size: int) -> np.ndarray:
    """Signed integer DFT frequencies in FFT order."""
    return np.rint(np.fft.fftfreq(size, d=1.0 / size))


def dealias_mask(*wavenumbers: np.ndarray, sizes: tuple[int, ...]) -> np.ndarray:
    """2/3-rule mask: keep ``|k_j| <= (2/3) * floor(s_j / 2)`` on every axis."""
    mask = np.ones(tuple(len(k) for k in wavenumbers), dtype=bool)
    for axis, (k, size) in enumerate(zip(wavenumbers, sizes, strict=True)):
        shape = [1] * len(wavenumbers)
        shape[axis] = len(k)
        mask &= (np.abs(k) <= (2.0 / 3.0) * (size // 2)).reshape(shape)
    return mask


def check_finite(values: np.ndarray, step: int, solver: str) -> None:
    """Raise :class:`SolverError` if the state blew up."""
    if not np.all(np.isfinite(values)):
        raise SolverError(f"{solver} solution became non-finite at step {step}", step=step)
