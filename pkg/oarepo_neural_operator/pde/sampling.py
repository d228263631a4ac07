#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Resolution changes between grids."""

from __future__ import annotations

from typing import TYPE_CHECKING

from oarepo_neural_operator.grid import FieldSample

if TYPE_CHECKING:
    from collections.abc import Sequence


def downsample(field: FieldSample, factor: int | Sequence[int]) -> FieldSample:
    """Strided subsampling without filtering; endpoints are kept on endpoint grids."""
    factors = (factor,) * field.grid.dims if isinstance(factor, int) else tuple(factor)
    grid = field.grid.downsampled(factors)
    values = field.values[tuple(slice(None, None, f) for f in factors)]
    return FieldSample(grid, values)
