#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Gaussian input measures ``N(0, c (-Laplacian + tau^2)^(-alpha))`` and their pushforwards."""

from __future__ import annotations

import dataclasses
import math
from typing import Any

from oarepo_neural_operator.errors import ConfigurationError
from oarepo_neural_operator.grid import Grid

KINDS = ("poisson_source", "darcy_coeff", "burgers_ic", "ns_vorticity_ic")
BOUNDARIES = ("dirichlet", "neumann", "periodic")


@dataclasses.dataclass(frozen=True)
class Threshold:
    """Pushforward ``T(x) = high if x >= level else low``."""

    level: float = 0.0
    low: float = 3.0
    high: float = 12.0


@dataclasses.dataclass(frozen=True)
class MeasureSpec:
    """Description of a Gaussian measure on a box domain.

    Eigenvalues are ``scale * (rho_k + shift) ** -exponent`` with ``rho_k`` the
    eigenvalues of the negative Laplacian under ``boundary`` conditions.
    """

    kind: str
    scale: float
    shift: float
    exponent: float
    boundary: str
    extent: tuple[tuple[float, float], ...]
    threshold: Threshold | None = None
    zero_mean: bool = False

    def __post_init__(self) -> None:
        """Validate the measure parameters."""
        if self.kind not in KINDS:
            raise ConfigurationError(f"Unknown measure kind {self.kind!r}, expected one of {KINDS}", key="kind")
        if self.boundary not in BOUNDARIES:
            raise ConfigurationError(
                f"Unknown boundary {self.boundary!r}, expected one of {BOUNDARIES}", key="boundary"
            )
        if self.exponent <= self.dims / 2:
            raise ConfigurationError(
                f"Exponent {self.exponent} must exceed d/2 = {self.dims / 2} for continuous samples",
                key="exponent",
            )
        if self.scale <= 0:
            raise ConfigurationError(f"Measure scale must be positive, got {self.scale}", key="scale")
        if self.threshold is not None and self.kind != "darcy_coeff":
            raise ConfigurationError("Threshold pushforward applies only to darcy_coeff", key="threshold")

    @property
    def dims(self) -> int:
        """Spatial dimension."""
        return len(self.extent)

    @classmethod
    def for_kind(cls, kind: str, **overrides: Any) -> MeasureSpec:
        """Preset measure for one of the four test problems."""
        try:
            preset = dict(PRESETS[kind])
        except KeyError:
            raise ConfigurationError(f"Unknown measure kind {kind!r}, expected one of {KINDS}", key="kind") from None
        preset.update(overrides)
        return cls(kind=kind, **preset)

    def grid(self, resolution: int) -> Grid:
        """Grid matching the measure's domain and boundary type."""
        return Grid(
            (resolution,) * self.dims,
            self.extent,
            (self.boundary == "periodic",) * self.dims,
        )

    def check_grid(self, grid: Grid) -> None:
        """Reject grids whose domain or boundary type disagree with the measure."""
        periodic = self.boundary == "periodic"
        if grid.dims != self.dims or any(p != periodic for p in grid.periodic):
            raise ConfigurationError(
                f"Grid {grid.sizes} (periodic={grid.periodic}) is incompatible with {self.boundary} measure "
                f"in {self.dims} dimensions"
            )

    def eigenvalue(self, rho: Any) -> Any:
        """Covariance eigenvalue for Laplacian eigenvalue(s) ``rho``."""
        return self.scale * (rho + self.shift) ** (-self.exponent)

    def to_dict(self) -> dict[str, Any]:
        """Manifest representation."""
        data = dataclasses.asdict(self)
        data["extent"] = [list(e) for e in self.extent]
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> MeasureSpec:
        """Inverse of :meth:`to_dict`."""
        data = dict(data)
        data["extent"] = tuple(tuple(e) for e in data["extent"])
        if data.get("threshold") is not None:
            data["threshold"] = Threshold(**data["threshold"])
        return cls(**data)


PRESETS: dict[str, dict[str, Any]] = {
    # (L + I)^-2, L the Dirichlet Laplacian on (0, 1)
    "poisson_source": {
        "scale": 1.0,
        "shift": 1.0,
        "exponent": 2.0,
        "boundary": "dirichlet",
        "extent": ((0.0, 1.0),),
    },
    # T#N(0, (-Laplacian + 9)^-2) with zero Neumann conditions on the unit square
    "darcy_coeff": {
        "scale": 1.0,
        "shift": 9.0,
        "exponent": 2.0,
        "boundary": "neumann",
        "extent": ((0.0, 1.0), (0.0, 1.0)),
        "threshold": Threshold(),
    },
    "burgers_ic": {
        "scale": 625.0,
        "shift": 25.0,
        "exponent": 2.0,
        "boundary": "periodic",
        "extent": ((0.0, 2.0 * math.pi),),
    },
    "ns_vorticity_ic": {
        "scale": 7.0**1.5,
        "shift": 49.0,
        "exponent": 2.5,
        "boundary": "periodic",
        "extent": ((0.0, 1.0), (0.0, 1.0)),
        "zero_mean": True,
    },
}
