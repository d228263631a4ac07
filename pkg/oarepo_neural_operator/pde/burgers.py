#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Viscous Burgers equation ``u_t + (u^2 / 2)_x = nu u_xx`` on a periodic interval."""

from __future__ import annotations

import logging

import numpy as np

from oarepo_neural_operator.errors import ConfigurationError
from oarepo_neural_operator.grid import FieldSample
from oarepo_neural_operator.pde.stepping import check_finite, dealias_mask, step_count

logger = logging.getLogger(__name__)

DEFAULT_DT = 1e-4


def solve_burgers(
    u0: FieldSample,
    t_end: float = 1.0,
    viscosity: float = 0.1,
    dt: float = DEFAULT_DT,
    nonlinear: bool = True,
) -> FieldSample:
    """Split-step pseudo-spectral march of Burgers' equation to ``t_end``.

    Each step multiplies by the exact heat factor ``exp(-nu k^2 dt)`` and then
    takes a forward Euler step of ``-(u^2 / 2)_x`` computed with 2/3-rule
    dealiasing.

    :param u0: initial condition on a periodic 1-D grid
    :param nonlinear: set to ``False`` to solve the heat equation only
    :raises SolverError: when the solution stops being finite
    """
    grid = u0.grid
    if grid.dims != 1 or not grid.periodic[0]:
        raise ConfigurationError(f"Burgers solver needs a periodic 1-D grid, got {grid.sizes}")
    if viscosity <= 0:
        raise ConfigurationError(f"Viscosity must be positive, got {viscosity}", key="viscosity")
    steps, dt = step_count(t_end, dt)
    size = grid.sizes[0]
    k = 2.0 * np.pi * np.fft.fftfreq(size, d=grid.spacing[0])
    heat = np.exp(-viscosity * k**2 * dt)
    derivative = 1j * k * dealias_mask(np.rint(k * grid.lengths[0] / (2.0 * np.pi)), sizes=(size,))

    u_hat = np.fft.fft(u0.scalar())
    for step in range(1, steps + 1):
        u_hat = heat * u_hat
        if nonlinear:
            u = np.real(np.fft.ifft(u_hat))
            u_hat = u_hat - dt * 0.5 * derivative * np.fft.fft(u * u)
            check_finite(u_hat, step, "Burgers")
    u = np.real(np.fft.ifft(u_hat))
    check_finite(u, steps, "Burgers")
    logger.debug("Burgers solve: %d steps of %.1e on %d points", steps, dt, size)
    return FieldSample(grid, u)
