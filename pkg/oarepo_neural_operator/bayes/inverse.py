#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Inverse problem setup: observation operator, noise model and likelihood."""

from __future__ import annotations

import dataclasses
import itertools
import logging
from typing import TYPE_CHECKING, Any

import numpy as np

from oarepo_neural_operator.errors import ConfigurationError
from oarepo_neural_operator.random_fields import MeasureSpec

if TYPE_CHECKING:
    from oarepo_neural_operator.bayes.forward_maps import ForwardMap
    from oarepo_neural_operator.grid import FieldSample, Grid
    from oarepo_neural_operator.random_fields import Rng

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class InverseProblemSpec:
    """Posterior over initial states given noisy point observations of the forward map.

    The noise covariance is ``gamma**2 I``; ``literal_covariance=True`` switches to
    ``(1 / gamma**2) I``.
    """

    forward_map: ForwardMap
    prior: MeasureSpec = dataclasses.field(default_factory=lambda: MeasureSpec.for_kind("ns_vorticity_ic"))
    resolution: int = 64
    gamma: float = 0.1
    beta: float = 0.1
    burn_in: int = 5000
    samples: int = 25000
    thin: int = 100
    observation_points: int = 7
    literal_covariance: bool = False

    def __post_init__(self) -> None:
        """Validate sampler settings."""
        if not 0.0 <= self.beta <= 1.0:
            raise ConfigurationError(f"pCN step beta must lie in [0, 1], got {self.beta}", key="invert.beta")
        if not self.gamma > 0:
            raise ConfigurationError(f"Noise scale gamma must be positive, got {self.gamma}", key="invert.gamma")
        if self.burn_in < 0 or self.samples < 1 or self.thin < 1:
            raise ConfigurationError("burn_in >= 0, samples >= 1 and thin >= 1 are required", key="invert.samples")
        if self.observation_points < 1:
            raise ConfigurationError("Need at least one observation point per axis", key="invert.observation_points")
        if self.prior.boundary != "periodic":
            raise ConfigurationError("Observations are taken on a periodic domain", key="invert.prior")

    @property
    def noise_variance(self) -> float:
        """Variance of each observation's noise."""
        return 1.0 / self.gamma**2 if self.literal_covariance else self.gamma**2

    def grid(self) -> Grid:
        """Grid the chain lives on."""
        return self.prior.grid(self.resolution)

    def to_dict(self) -> dict[str, Any]:
        """Manifest representation (without the forward map object)."""
        return {
            "forward_map": self.forward_map.name,
            "prior": self.prior.to_dict(),
            "resolution": self.resolution,
            "gamma": self.gamma,
            "beta": self.beta,
            "burn_in": self.burn_in,
            "samples": self.samples,
            "thin": self.thin,
            "observation_points": self.observation_points,
            "literal_covariance": self.literal_covariance,
        }


def observation_points(grid: Grid, per_axis: int = 7) -> np.ndarray:
    """Uniform interior points ``lo + L * i / (per_axis + 1)``, ``i = 1 .. per_axis``.

    Returned as ``(per_axis ** d, d)``; the first coordinate varies fastest, so
    in 2-D consecutive blocks of ``per_axis`` rows share one ``y``.
    """
    axes = [lo + (hi - lo) * np.arange(1, per_axis + 1) / (per_axis + 1) for lo, hi in grid.extents]
    return np.array([tuple(reversed(p)) for p in itertools.product(*reversed(axes))], dtype=np.float64)


def interpolate_periodic(field: FieldSample, points: np.ndarray) -> np.ndarray:
    """Multilinear interpolation of a scalar periodic field at arbitrary points."""
    grid = field.grid
    if not all(grid.periodic):
        raise ConfigurationError("Observation operator needs a field on the torus")
    values = field.scalar()
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    lower, weights = [], []
    for j, ((lo, _), size, h) in enumerate(zip(grid.extents, grid.sizes, grid.spacing, strict=True)):
        position = (points[:, j] - lo) / h
        base = np.floor(position)
        lower.append(base.astype(np.intp) % size)
        weights.append(position - base)
    result = np.zeros(len(points))
    for corner in itertools.product((0, 1), repeat=grid.dims):
        index = tuple((lower[j] + c) % grid.sizes[j] for j, c in enumerate(corner))
        weight = np.prod([weights[j] if c else 1.0 - weights[j] for j, c in enumerate(corner)], axis=0)
        result += weight * values[index]
    return result


def observe(w: FieldSample, spec: InverseProblemSpec) -> np.ndarray:
    """Interpolated values at the interior observation points (49 in 2-D)."""
    return interpolate_periodic(w, observation_points(w.grid, spec.observation_points))


def log_likelihood(w0: FieldSample, y: np.ndarray, spec: InverseProblemSpec) -> float:
    """``-1/2 |y - O(G(w0))|^2`` weighted by the inverse noise variance."""
    misfit = np.asarray(y, dtype=np.float64) - observe(spec.forward_map(w0), spec)
    return -0.5 * float(misfit @ misfit) / spec.noise_variance


def synthetic_observations(w0: FieldSample, spec: InverseProblemSpec, rng: Rng) -> np.ndarray:
    """Noisy observations of the forward map applied to a known initial state."""
    clean = observe(spec.forward_map(w0), spec)
    return clean + np.sqrt(spec.noise_variance) * rng.normal(clean.shape)
