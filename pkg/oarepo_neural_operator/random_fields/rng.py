#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Seeded, stream-addressable random number generation."""

from __future__ import annotations

from typing import Any

import numpy as np


class Rng:
    """Counter-based generator identified by ``(seed, stream)``.

    Backed by numpy's Philox bit generator, so the same seed, stream and call
    sequence give the same numbers on every platform. Streams are independent:
    dataset generation uses the sample index as the stream id.
    """

    def __init__(self, seed: int, stream: int = 0) -> None:
        """Create the generator for one stream of a seed."""
        self.seed = int(seed)
        self.stream = int(stream)
        sequence = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        self.generator = np.random.Generator(np.random.Philox(sequence))

    def __repr__(self) -> str:
        return f"Rng(seed={self.seed}, stream={self.stream})"

    def spawn(self, stream: int) -> Rng:
        """Another stream of the same seed."""
        return Rng(self.seed, stream)

    def normal(self, size: Any = None) -> np.ndarray:
        """Standard normal draws."""
        return self.generator.standard_normal(size)

    def uniform(self, low: float = 0.0, high: float = 1.0, size: Any = None) -> np.ndarray:
        """Uniform draws on ``[low, high)``."""
        return self.generator.uniform(low, high, size)

    def permutation(self, n: int) -> np.ndarray:
        """Random permutation of ``range(n)``."""
        return self.generator.permutation(n)

    def choice(self, n: int, k: int) -> np.ndarray:
        """``k`` distinct indices out of ``range(n)``."""
        return self.generator.choice(n, size=k, replace=False)
