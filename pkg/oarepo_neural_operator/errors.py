#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Exception hierarchy shared by all modules.

Every exception derives from one of the builtin exceptions so callers that
only know about ``ValueError``/``RuntimeError`` keep working. The CLI maps
configuration-like errors to exit code 2 and numerical failures to exit code 3.
"""

from __future__ import annotations


class NeuralOperatorError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(NeuralOperatorError, ValueError):
    """Invalid configuration value, unknown key or incompatible setup."""

    def __init__(self, message: str, key: str | None = None) -> None:
        """Create the error.

        :param message: Human readable description.
        :param key: Offending configuration key, if known.
        """
        super().__init__(message)
        self.key = key


class DimensionError(ConfigurationError):
    """Shape mismatch inside a tensor primitive or a layer."""

    def __init__(self, primitive: str, *shapes: tuple[int, ...], detail: str = "") -> None:
        """Create the error naming the primitive and the offending shapes."""
        shapes_txt = " and ".join(str(tuple(s)) for s in shapes)
        message = f"{primitive}: incompatible shapes {shapes_txt}"
        if detail:
            message = f"{message} ({detail})"
        super().__init__(message)
        self.primitive = primitive
        self.shapes = shapes


class ContractError(NeuralOperatorError, ValueError):
    """A documented precondition of an operation was violated."""


class DomainError(NeuralOperatorError, ValueError):
    """Input lies outside the mathematical domain of an operation."""


class UnsupportedError(NeuralOperatorError, NotImplementedError):
    """Requested behaviour is deliberately not supported."""


class SolverError(NeuralOperatorError, RuntimeError):
    """A PDE solver failed (blow-up, non-convergence)."""

    def __init__(
        self,
        message: str,
        step: int | None = None,
        residual: float | None = None,
        sample_index: int | None = None,
    ) -> None:
        """Create the error with optional diagnostics."""
        super().__init__(message)
        self.step = step
        self.residual = residual
        self.sample_index = sample_index


class NumericalError(NeuralOperatorError, RuntimeError):
    """Training or inversion produced non-finite numbers."""

    def __init__(self, message: str, checkpoint: str | None = None) -> None:
        """Create the error, remembering the last good checkpoint path."""
        super().__init__(message)
        self.checkpoint = checkpoint
