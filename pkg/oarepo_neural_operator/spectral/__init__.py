#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Fourier transforms, retained-mode bookkeeping and energy spectra."""

from oarepo_neural_operator.spectral.modes import ModeSet, enforce_conjugate_symmetry, pad_modes, truncate_modes
from oarepo_neural_operator.spectral.spectrum import SpectrumProfile, spectrum
from oarepo_neural_operator.tensor.complex import fft, ifft

__all__ = (
    "ModeSet",
    "SpectrumProfile",
    "enforce_conjugate_symmetry",
    "fft",
    "ifft",
    "pad_modes",
    "spectrum",
    "truncate_modes",
)
