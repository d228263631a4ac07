#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Float64 tensors with a reverse-mode differentiation tape."""

from __future__ import annotations

from oarepo_neural_operator.tensor.tensor import Tensor, as_tensor  # noqa: I001
from oarepo_neural_operator.tensor import ops
from oarepo_neural_operator.tensor.complex import ComplexTensor, complex_einsum, fft, ifft
from oarepo_neural_operator.tensor.tape import Tape, TapeNode, get_tape, is_recording, no_grad

__all__ = [
    "ComplexTensor",
    "Tape",
    "TapeNode",
    "Tensor",
    "as_tensor",
    "complex_einsum",
    "fft",
    "get_tape",
    "ifft",
    "is_recording",
    "no_grad",
    "ops",
]
