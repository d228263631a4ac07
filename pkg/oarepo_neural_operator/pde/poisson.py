#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""1-D Poisson problem ``-u'' = f`` on (0, 1) with zero Dirichlet data."""

from __future__ import annotations

from typing import Any

import numpy as np

from oarepo_neural_operator.errors import ConfigurationError
from oarepo_neural_operator.grid import FieldSample


def green_function(x: Any, y: Any) -> Any:
    """Green's function ``G(x, y) = (x + y - |y - x|) / 2 - x y``."""
    x, y = np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64)
    return 0.5 * (x + y - np.abs(y - x)) - x * y


def trapezoid_weights(n: int, h: float) -> np.ndarray:
    """Trapezoidal quadrature weights on ``n`` equispaced points."""
    w = np.full(n, h)
    w[0] = w[-1] = 0.5 * h
    return w


def solve_poisson_green(f: FieldSample) -> FieldSample:
    """Solve by trapezoidal quadrature of ``u(x) = int G(x, y) f(y) dy``."""
    grid = f.grid
    if grid.dims != 1 or grid.periodic[0]:
        raise ConfigurationError(f"Poisson solver needs a 1-D endpoint grid, got {grid.sizes}")
    x = grid.axis_coordinates(0)
    kernel = green_function(x[:, None], x[None, :])
    weights = trapezoid_weights(len(x), grid.spacing[0])
    return f.with_values(kernel @ (weights[:, None] * f.values))
