#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""2-D incompressible Navier-Stokes in vorticity-streamfunction form on the unit torus.

``w_t + u . grad w = nu Lap w + f`` with ``-Lap psi = w`` and ``u = (psi_y, -psi_x)``.
The viscous term is advanced by Crank-Nicolson, advection and forcing by Heun's
method; products are dealiased with the 2/3 rule.
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np

from oarepo_neural_operator.errors import ConfigurationError, DomainError
from oarepo_neural_operator.grid import FieldSample, Grid
from oarepo_neural_operator.pde.stepping import check_finite, dealias_mask, integer_wavenumbers, step_count

if TYPE_CHECKING:
    from collections.abc import Callable

logger = logging.getLogger(__name__)

DEFAULT_DT = 1e-4
DEFAULT_RECORD_EVERY = 1.0


def default_forcing(grid: Grid) -> np.ndarray:
    """``0.1 (sin(2 pi (x + y)) + cos(2 pi (x + y)))`` on the grid."""
    xy = grid.coordinates()
    phase = 2.0 * np.pi * (xy[..., 0] + xy[..., 1])
    return 0.1 * (np.sin(phase) + np.cos(phase))


class VorticityStepper:
    """Pseudo-spectral time stepper holding precomputed wavenumber arrays."""

    def __init__(self, grid: Grid, viscosity: float, dt: float, forcing: np.ndarray | None) -> None:
        """Prepare operators for ``grid`` with step ``dt``."""
        if grid.dims != 2 or not all(grid.periodic):
            raise ConfigurationError(f"Navier-Stokes solver needs a periodic 2-D grid, got {grid.sizes}")
        if viscosity <= 0:
            raise ConfigurationError(f"Viscosity must be positive, got {viscosity}", key="viscosity")
        self.grid = grid
        self.dt = dt
        kx_int = integer_wavenumbers(grid.sizes[0])
        ky_int = integer_wavenumbers(grid.sizes[1])
        self.kx = (2.0 * np.pi / grid.lengths[0] * kx_int)[:, None]
        self.ky = (2.0 * np.pi / grid.lengths[1] * ky_int)[None, :]
        self.lap = self.kx**2 + self.ky**2
        self.inv_lap = np.where(self.lap > 0, 1.0 / np.where(self.lap > 0, self.lap, 1.0), 0.0)
        self.dealias = dealias_mask(kx_int, ky_int, sizes=grid.sizes)
        half = 0.5 * dt * viscosity * self.lap
        self.explicit = 1.0 - half
        self.implicit = 1.0 / (1.0 + half)
        self.forcing_hat = None if forcing is None else np.fft.fft2(forcing)

    def velocity(self, w_hat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Velocity ``(psi_y, -psi_x)`` from the vorticity spectrum."""
        psi_hat = w_hat * self.inv_lap
        u = np.real(np.fft.ifft2(1j * self.ky * psi_hat))
        v = np.real(np.fft.ifft2(-1j * self.kx * psi_hat))
        return u, v

    def tendency(self, w_hat: np.ndarray) -> np.ndarray:
        """Spectrum of ``-u . grad w + f`` with dealiasing."""
        u, v = self.velocity(w_hat)
        wx = np.real(np.fft.ifft2(1j * self.kx * w_hat))
        wy = np.real(np.fft.ifft2(1j * self.ky * w_hat))
        out = -self.dealias * np.fft.fft2(u * wx + v * wy)
        if self.forcing_hat is not None:
            out = out + self.forcing_hat
        out[0, 0] = 0.0
        return out

    def step(self, w_hat: np.ndarray) -> np.ndarray:
        """One Crank-Nicolson / Heun step."""
        n0 = self.tendency(w_hat)
        predictor = (self.explicit * w_hat + self.dt * n0) * self.implicit
        n1 = self.tendency(predictor)
        return (self.explicit * w_hat + 0.5 * self.dt * (n0 + n1)) * self.implicit


def solve_navier_stokes(
    w0: FieldSample,
    t_end: float,
    viscosity: float = 1e-3,
    record_every: float = DEFAULT_RECORD_EVERY,
    dt: float = DEFAULT_DT,
    forcing: np.ndarray | Callable[[Grid], np.ndarray] | None = default_forcing,
) -> list[FieldSample]:
    """Integrate vorticity to ``t_end``, recording every ``record_every`` time units.

    :param w0: mean-zero initial vorticity on the periodic unit square
    :param forcing: forcing field, a callable building it from the grid, or ``None`` to switch forcing off
    :return: vorticity at times ``record_every, 2 * record_every, ..., t_end``
    :raises DomainError: if ``w0`` does not have zero mean
    :raises SolverError: when the solution stops being finite
    """
    grid = w0.grid
    w = w0.scalar()
    mean = float(np.mean(w))
    if abs(mean) > 1e-10 * max(1.0, float(np.max(np.abs(w)))):
        raise DomainError(f"Initial vorticity must have zero mean, got mean {mean:.3e}")
    if record_every <= 0:
        raise ConfigurationError(f"record_every must be positive, got {record_every}", key="record_every")
    records, _ = step_count(t_end, record_every)
    if records and abs(records * record_every - t_end) > 1e-9 * max(1.0, t_end):
        raise ConfigurationError(
            f"t_end={t_end} is not a multiple of record_every={record_every}", key="record_every"
        )
    steps_per_record, dt = step_count(record_every, dt)
    if callable(forcing):
        forcing = forcing(grid)
    stepper = VorticityStepper(grid, viscosity, dt, forcing)

    w_hat = np.fft.fft2(w)
    trajectory = []
    step = 0
    for _ in range(records):
        for _ in range(steps_per_record):
            w_hat = stepper.step(w_hat)
            step += 1
        w = np.real(np.fft.ifft2(w_hat))
        check_finite(w, step, "Navier-Stokes")
        trajectory.append(FieldSample(grid, w))
    logger.debug("Navier-Stokes solve: %d steps of %.1e, %d records", step, dt, len(trajectory))
    return trajectory
