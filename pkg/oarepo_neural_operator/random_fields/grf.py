#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Karhunen-Loeve sampling of Gaussian random fields.

Samples are synthesised in the eigenbasis of the Laplacian on the grid:
complex exponentials for periodic domains, sines (DST-I) for Dirichlet and
cosines (DCT-I) for Neumann boundaries. Every representable mode is kept.
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
import scipy.fft

from oarepo_neural_operator.errors import ConfigurationError
from oarepo_neural_operator.grid import FieldSample, Grid

if TYPE_CHECKING:
    from oarepo_neural_operator.random_fields.measures import MeasureSpec
    from oarepo_neural_operator.random_fields.rng import Rng

logger = logging.getLogger(__name__)


def _axis_wavenumbers(spec: MeasureSpec, grid: Grid, axis: int) -> np.ndarray:
    size, length = grid.sizes[axis], grid.lengths[axis]
    if spec.boundary == "periodic":
        k = np.rint(np.fft.fftfreq(size, d=1.0 / size))
        return 2.0 * np.pi * k / length
    if spec.boundary == "dirichlet":
        return np.pi * np.arange(1, size - 1) / length
    return np.pi * np.arange(size) / length


def _axis_norms(spec: MeasureSpec, grid: Grid, axis: int) -> np.ndarray:
    size, length = grid.sizes[axis], grid.lengths[axis]
    if spec.boundary == "dirichlet":
        return np.full(size - 2, np.sqrt(2.0 / length))
    norms = np.full(size, np.sqrt(2.0 / length))
    norms[0] = np.sqrt(1.0 / length)
    return norms


def _outer(factors: list[np.ndarray], combine=np.multiply) -> np.ndarray:
    out = factors[0]
    for factor in factors[1:]:
        out = combine.outer(out, factor)
    return out


def laplacian_eigenvalues(spec: MeasureSpec, grid: Grid) -> np.ndarray:
    """Eigenvalues ``rho_k`` of the negative Laplacian in the grid's mode layout.

    Periodic modes follow FFT ordering, Dirichlet modes are ``k = 1 .. s - 2``
    and Neumann modes ``k = 0 .. s - 1`` along each axis.
    """
    spec.check_grid(grid)
    squares = [_axis_wavenumbers(spec, grid, j) ** 2 for j in range(grid.dims)]
    return _outer(squares, np.add)


def eigenvalues(spec: MeasureSpec, grid: Grid) -> np.ndarray:
    """Covariance eigenvalues ``lambda_k`` in the grid's mode layout."""
    return spec.eigenvalue(laplacian_eigenvalues(spec, grid))


def sample_gaussian(spec: MeasureSpec, grid: Grid, rng: Rng) -> FieldSample:
    """Draw from ``N(0, C)`` without applying any pushforward."""
    lam = eigenvalues(spec, grid)
    sigma = np.sqrt(lam)
    if spec.boundary == "periodic":
        if spec.zero_mean:
            sigma[(0,) * grid.dims] = 0.0
        z = sigma * (rng.normal(lam.shape) + 1j * rng.normal(lam.shape))
        values = np.real(np.fft.ifftn(z)) * grid.num_points / np.sqrt(grid.volume)
        return FieldSample(grid, values)

    norms = _outer([_axis_norms(spec, grid, j) for j in range(grid.dims)])
    coeffs = sigma * norms * rng.normal(lam.shape)
    if spec.boundary == "dirichlet":
        interior = scipy.fft.dstn(coeffs, type=1) / 2.0**grid.dims
        values = np.zeros(grid.sizes)
        values[(slice(1, -1),) * grid.dims] = interior
        return FieldSample(grid, values)

    halves = []
    for size in grid.sizes:
        w = np.full(size, 0.5)
        w[0] = w[-1] = 1.0
        halves.append(w)
    values = scipy.fft.dctn(coeffs * _outer(halves), type=1)
    return FieldSample(grid, values)


def sample_grf(spec: MeasureSpec, grid: Grid, rng: Rng) -> FieldSample:
    """Draw one sample of the measure ``spec`` (pushforward included) on ``grid``."""
    field = sample_gaussian(spec, grid, rng)
    if spec.threshold is not None:
        t = spec.threshold
        field = field.with_values(np.where(field.values >= t.level, t.high, t.low))
    return field


def modal_coefficients(field: FieldSample, spec: MeasureSpec) -> np.ndarray:
    """Coefficients of a field in the orthonormal eigenbasis used for sampling.

    For a Gaussian draw ``E|c_k|^2 = lambda_k`` for every mode below the grid's
    Nyquist limit.
    """
    grid = field.grid
    spec.check_grid(grid)
    u = field.scalar()
    if spec.boundary == "periodic":
        return np.fft.fftn(u) * np.sqrt(grid.volume) / grid.num_points
    factors = [h / 2.0 * _axis_norms(spec, grid, j) for j, h in enumerate(grid.spacing)]
    if spec.boundary == "dirichlet":
        interior = u[(slice(1, -1),) * grid.dims]
        return scipy.fft.dstn(interior, type=1) * _outer(factors)
    return scipy.fft.dctn(u, type=1) * _outer(factors)


def add_noise(a: FieldSample, level: float, rng: Rng) -> FieldSample:
    """Pointwise noise ``a + level * max|a| * xi`` with ``xi ~ N(0, 1)`` i.i.d."""
    if level < 0:
        raise ConfigurationError(f"Noise level must be nonnegative, got {level}", key="noise_level")
    sup = float(np.max(np.abs(a.values))) if a.values.size else 0.0
    noise = rng.normal(a.values.shape)
    return a.with_values(a.values + level * sup * noise)
