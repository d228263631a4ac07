#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Uniform grids and fields sampled on them."""

from __future__ import annotations

import dataclasses
from typing import TYPE_CHECKING, Any

import numpy as np

from oarepo_neural_operator.errors import ConfigurationError, DomainError

if TYPE_CHECKING:
    from collections.abc import Sequence


@dataclasses.dataclass(frozen=True)
class Grid:
    """Tensor-product uniform grid.

    Periodic axes hold ``s`` points ``lo + i * (hi - lo) / s`` (no duplicated
    endpoint); other axes hold ``s`` points including both endpoints.
    """

    sizes: tuple[int, ...]
    extents: tuple[tuple[float, float], ...]
    periodic: tuple[bool, ...]

    def __post_init__(self) -> None:
        """Normalise field types and check consistency."""
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        object.__setattr__(self, "extents", tuple((float(lo), float(hi)) for lo, hi in self.extents))
        object.__setattr__(self, "periodic", tuple(bool(p) for p in self.periodic))
        if not (len(self.sizes) == len(self.extents) == len(self.periodic)):
            raise ConfigurationError("Grid sizes, extents and periodic flags must have the same length")
        for size, (lo, hi), periodic in zip(self.sizes, self.extents, self.periodic, strict=True):
            if size < (1 if periodic else 2):
                raise ConfigurationError(f"Grid axis needs more points, got {size}", key="resolution")
            if hi <= lo:
                raise ConfigurationError(f"Empty grid extent ({lo}, {hi})")

    @classmethod
    def uniform(
        cls,
        sizes: int | Sequence[int],
        dims: int = 1,
        extent: tuple[float, float] = (0.0, 1.0),
        periodic: bool = False,
    ) -> Grid:
        """Same size, extent and boundary type on every axis."""
        if isinstance(sizes, int):
            sizes = (sizes,) * dims
        d = len(sizes)
        return cls(tuple(sizes), (extent,) * d, (periodic,) * d)

    @property
    def dims(self) -> int:
        """Spatial dimension."""
        return len(self.sizes)

    @property
    def num_points(self) -> int:
        """Total number of grid points."""
        return int(np.prod(self.sizes))

    @property
    def lengths(self) -> tuple[float, ...]:
        """Per-axis extent length."""
        return tuple(hi - lo for lo, hi in self.extents)

    @property
    def spacing(self) -> tuple[float, ...]:
        """Per-axis grid spacing."""
        return tuple(
            length / (size if periodic else size - 1)
            for length, size, periodic in zip(self.lengths, self.sizes, self.periodic, strict=True)
        )

    @property
    def volume(self) -> float:
        """Measure of the domain."""
        return float(np.prod(self.lengths))

    def axis_coordinates(self, axis: int) -> np.ndarray:
        """Coordinates along one axis."""
        (lo, _), size, h = self.extents[axis], self.sizes[axis], self.spacing[axis]
        return lo + h * np.arange(size)

    def coordinates(self) -> np.ndarray:
        """Coordinates shaped ``(*sizes, dims)``."""
        axes = np.meshgrid(*(self.axis_coordinates(j) for j in range(self.dims)), indexing="ij")
        return np.stack(axes, axis=-1)

    def points(self) -> np.ndarray:
        """Coordinates flattened to ``(num_points, dims)``."""
        return self.coordinates().reshape(-1, self.dims)

    def downsampled(self, factors: Sequence[int]) -> Grid:
        """Grid obtained by keeping every ``factor``-th point per axis."""
        sizes = []
        for size, factor, periodic in zip(self.sizes, factors, self.periodic, strict=True):
            if factor < 1:
                raise ConfigurationError(f"Downsampling factor must be positive, got {factor}", key="factor")
            span = size if periodic else size - 1
            if span % factor:
                raise ConfigurationError(
                    f"Downsampling factor {factor} does not divide "
                    f"{'s' if periodic else 's - 1'} = {span}",
                    key="factor",
                )
            sizes.append(span // factor if periodic else span // factor + 1)
        return Grid(tuple(sizes), self.extents, self.periodic)

    def to_dict(self) -> dict[str, Any]:
        """Manifest representation."""
        return {"sizes": list(self.sizes), "extents": [list(e) for e in self.extents], "periodic": list(self.periodic)}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Grid:
        """Inverse of :meth:`to_dict`."""
        return cls(tuple(data["sizes"]), tuple(tuple(e) for e in data["extents"]), tuple(data["periodic"]))


@dataclasses.dataclass
class FieldSample:
    """Values of a (vector) field on a grid, shaped ``(*grid.sizes, channels)``."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        """Add the channel axis if missing and validate the shape."""
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape == self.grid.sizes:
            values = values[..., None]
        if values.shape[:-1] != self.grid.sizes:
            raise ConfigurationError(f"Field of shape {values.shape} does not match grid sizes {self.grid.sizes}")
        if not np.all(np.isfinite(values)):
            raise DomainError("Field contains non-finite values")
        self.values = values

    @property
    def channels(self) -> int:
        """Number of channels."""
        return self.values.shape[-1]

    def scalar(self) -> np.ndarray:
        """Values of a single-channel field without the channel axis."""
        if self.channels != 1:
            raise ConfigurationError(f"Expected a scalar field, got {self.channels} channels")
        return self.values[..., 0]

    def with_values(self, values: Any) -> FieldSample:
        """Field on the same grid with new values."""
        return FieldSample(self.grid, values)
