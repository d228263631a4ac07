#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Seeded randomness and samplers for the input measures."""

from oarepo_neural_operator.random_fields.grf import (
    add_noise,
    eigenvalues,
    laplacian_eigenvalues,
    modal_coefficients,
    sample_gaussian,
    sample_grf,
)
from oarepo_neural_operator.random_fields.measures import KINDS, PRESETS, MeasureSpec, Threshold
from oarepo_neural_operator.random_fields.rng import Rng

__all__ = (
    "KINDS",
    "PRESETS",
    "MeasureSpec",
    "Rng",
    "Threshold",
    "add_noise",
    "eigenvalues",
    "laplacian_eigenvalues",
    "modal_coefficients",
    "sample_gaussian",
    "sample_grf",
)
