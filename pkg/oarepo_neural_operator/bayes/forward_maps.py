#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Forward map implementations: the numerical solver or a trained surrogate."""

from __future__ import annotations

import time
from abc import ABC, abstractmethod
from typing import TYPE_CHECKING, Any, ClassVar

from oarepo_neural_operator.pde.navier_stokes import default_forcing, solve_navier_stokes

if TYPE_CHECKING:
    from collections.abc import Callable

    from oarepo_neural_operator.grid import FieldSample
    from oarepo_neural_operator.nop.models import OperatorModel


class ForwardMap(ABC):
    """Abstract base class for maps from initial vorticity to the observed state.

    Calls are counted and timed for the inversion timing report.
    """

    name: ClassVar[str] = ""

    def __init__(self) -> None:
        """Start with zero recorded calls."""
        self.calls = 0
        self.seconds = 0.0

    def __call__(self, w0: FieldSample) -> FieldSample:
        """Evaluate and record the wall-clock time."""
        start = time.perf_counter()
        result = self.evaluate(w0)
        self.seconds += time.perf_counter() - start
        self.calls += 1
        return result

    @abstractmethod
    def evaluate(self, w0: FieldSample) -> FieldSample:
        """Map an initial state to the state that is observed.

        :param w0: Initial vorticity
        :return: Scalar field on the same grid
        """

    def reset_timing(self) -> None:
        """Forget recorded calls."""
        self.calls, self.seconds = 0, 0.0

    @property
    def seconds_per_call(self) -> float:
        """Mean wall-clock time per evaluation."""
        return self.seconds / self.calls if self.calls else 0.0


class SolverForwardMap(ForwardMap):
    """Forward map that integrates the vorticity equation to ``t_end``."""

    name = "solver"

    def __init__(self, t_end: float = 50.0, viscosity: float = 1e-3, dt: float = 1e-4, forcing: bool = True) -> None:
        """Solver settings of the data generation."""
        super().__init__()
        self.t_end = t_end
        self.viscosity = viscosity
        self.dt = dt
        self.forcing = forcing

    def evaluate(self, w0: FieldSample) -> FieldSample:
        """Vorticity at ``t_end``."""
        records = solve_navier_stokes(
            w0,
            self.t_end,
            viscosity=self.viscosity,
            record_every=self.t_end,
            dt=self.dt,
            forcing=default_forcing if self.forcing else None,
        )
        return records[-1]


class SurrogateForwardMap(ForwardMap):
    """Forward map backed by a trained operator model."""

    name = "surrogate"

    def __init__(self, model: OperatorModel) -> None:
        """Wrap a trained model mapping ``w0`` to the observed state."""
        super().__init__()
        self.model = model

    def evaluate(self, w0: FieldSample) -> FieldSample:
        """Model prediction; for multi-channel outputs the last channel is the final state."""
        pred = self.model.predict(w0)
        return pred.with_values(pred.values[..., -1:])


class FunctionForwardMap(ForwardMap):
    """Forward map wrapping a plain function on field values."""

    name = "function"

    def __init__(self, fn: Callable[[Any], Any]) -> None:
        """:param fn: maps the value array of ``w0`` to an array of the same shape."""
        super().__init__()
        self.fn = fn

    def evaluate(self, w0: FieldSample) -> FieldSample:
        """Apply ``fn`` to the values."""
        return w0.with_values(self.fn(w0.values))


def get_forward_map(name: str, **kwargs: Any) -> ForwardMap:
    """Instantiate a forward map registered in the configuration."""
    from oarepo_neural_operator.utils import get_forward_map_class

    return get_forward_map_class(name)(**kwargs)
