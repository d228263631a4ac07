#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Complex tensors stored as stacked real/imaginary parts.

A :class:`ComplexTensor` wraps one real :class:`Tensor` of shape ``(2, *shape)``
(index 0 real part, index 1 imaginary part), so gradients flow through the
ordinary real tape. Primitives that are genuinely complex (multiplication,
discrete Fourier transforms) do the Wirtinger bookkeeping in their own
backward closures: for a real loss the gradient with respect to ``z`` is
returned as ``dL/dRe z + i dL/dIm z``.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Any

import numpy as np

from oarepo_neural_operator.errors import DimensionError
from oarepo_neural_operator.tensor import ops
from oarepo_neural_operator.tensor.ops import _parse_einsum, _result
from oarepo_neural_operator.tensor.tensor import Tensor, as_tensor

if TYPE_CHECKING:
    from collections.abc import Sequence


def _to_complex(parts: np.ndarray) -> np.ndarray:
    return parts[0] + 1j * parts[1]


def _to_parts(z: np.ndarray) -> np.ndarray:
    return np.stack([z.real, z.imag])


class ComplexTensor:
    """Complex array represented by a real tensor of paired parts."""

    def __init__(self, parts: Tensor) -> None:
        """Wrap ``parts`` of shape ``(2, *shape)``."""
        if parts.ndim < 1 or parts.shape[0] != 2:
            raise DimensionError("complex", parts.shape, detail="leading axis must hold real/imaginary parts")
        self.parts = parts

    @classmethod
    def from_numpy(cls, z: Any, requires_grad: bool = False, name: str | None = None) -> ComplexTensor:
        """Create a complex tensor from a numpy (complex) array."""
        z = np.asarray(z, dtype=np.complex128)
        return cls(Tensor(_to_parts(z), requires_grad=requires_grad, name=name))

    @classmethod
    def from_real(cls, real: Any, imag: Any | None = None) -> ComplexTensor:
        """Build from a real tensor and an optional imaginary tensor."""
        real = as_tensor(real)
        imag = Tensor(np.zeros(real.shape)) if imag is None else as_tensor(imag)
        return cls(ops.stack([real, imag], axis=0))

    @property
    def shape(self) -> tuple[int, ...]:
        """Shape of the complex array."""
        return self.parts.shape[1:]

    @property
    def ndim(self) -> int:
        """Number of complex axes."""
        return self.parts.ndim - 1

    @property
    def real(self) -> Tensor:
        """Real part as a tensor."""
        return self.parts[0]

    @property
    def imag(self) -> Tensor:
        """Imaginary part as a tensor."""
        return self.parts[1]

    def numpy(self) -> np.ndarray:
        """Return the value as a complex numpy array."""
        return _to_complex(self.parts.data)

    def conj(self) -> ComplexTensor:
        """Complex conjugate."""
        sign = np.ones((2,) + (1,) * self.ndim)
        sign[1] = -1.0
        return ComplexTensor(self.parts * sign)

    def _axis(self, axis: int) -> int:
        return (axis % self.ndim) + 1

    def reshape(self, *shape: int) -> ComplexTensor:
        """Reshape the complex array."""
        if len(shape) == 1 and isinstance(shape[0], tuple | list):
            shape = tuple(shape[0])
        return ComplexTensor(ops.reshape(self.parts, (2, *shape)))

    def gather(self, index: Any, axis: int) -> ComplexTensor:
        """Select entries along ``axis``."""
        return ComplexTensor(ops.gather(self.parts, index, axis=self._axis(axis)))

    def scatter_add(self, index: Any, size: int, axis: int) -> ComplexTensor:
        """Accumulate entries into ``size`` buckets along ``axis``."""
        return ComplexTensor(ops.scatter_add(self.parts, index, size, axis=self._axis(axis)))

    def __add__(self, other: ComplexTensor) -> ComplexTensor:
        return ComplexTensor(self.parts + other.parts)

    def __sub__(self, other: ComplexTensor) -> ComplexTensor:
        return ComplexTensor(self.parts - other.parts)

    def scale(self, factor: Any) -> ComplexTensor:
        """Multiply by a real factor broadcast over the complex shape."""
        factor = as_tensor(factor)
        return ComplexTensor(self.parts * ops.reshape(factor, (1, *factor.shape)))


def complex_einsum(subscripts: str, a: ComplexTensor, b: ComplexTensor) -> ComplexTensor:
    """Two-operand complex Einstein summation (complex multiply primitive)."""
    left, right, output = _parse_einsum(subscripts)
    za, zb = _to_complex(a.parts.data), _to_complex(b.parts.data)
    try:
        out = np.einsum(f"{left},{right}->{output}", za, zb)
    except ValueError as e:
        raise DimensionError("complex_einsum", a.shape, b.shape, detail=subscripts) from e

    def _backward(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        zg = _to_complex(g)
        grad_a = np.einsum(f"{output},{right}->{left}", zg, np.conj(zb))
        grad_b = np.einsum(f"{left},{output}->{right}", np.conj(za), zg)
        return _to_parts(grad_a), _to_parts(grad_b)

    return ComplexTensor(_result("complex_einsum", _to_parts(out), (a.parts, b.parts), _backward))


def _fft_axes(ndim: int, axes: Sequence[int], op: str, shape: tuple[int, ...]) -> tuple[int, ...]:
    for axis in axes:
        if not -ndim <= axis < ndim:
            raise DimensionError(op, shape, detail=f"axis {axis} out of range")
    return tuple((axis % ndim) + 1 for axis in axes)


def fft(v: Tensor | ComplexTensor, axes: Sequence[int]) -> ComplexTensor:
    """Unnormalised forward DFT over ``axes`` with kernel ``exp(-2 pi i x k / s)``."""
    z = v if isinstance(v, ComplexTensor) else ComplexTensor.from_real(v)
    part_axes = _fft_axes(z.ndim, axes, "fft", z.shape)
    sizes = [z.parts.shape[a] for a in part_axes]
    total = float(np.prod(sizes))
    out = np.fft.fftn(_to_complex(z.parts.data), axes=[a - 1 for a in part_axes])

    def _backward(g: np.ndarray) -> tuple[np.ndarray]:
        # adjoint of the unnormalised DFT is its conjugate transform
        grad = np.fft.ifftn(_to_complex(g), axes=[a - 1 for a in part_axes]) * total
        return (_to_parts(grad),)

    return ComplexTensor(_result("fft", _to_parts(out), (z.parts,), _backward))


def ifft(w: ComplexTensor, axes: Sequence[int]) -> ComplexTensor:
    """Inverse DFT over ``axes`` including the ``1 / prod(s)`` normalisation."""
    part_axes = _fft_axes(w.ndim, axes, "ifft", w.shape)
    sizes = [w.parts.shape[a] for a in part_axes]
    total = float(np.prod(sizes))
    out = np.fft.ifftn(_to_complex(w.parts.data), axes=[a - 1 for a in part_axes])

    def _backward(g: np.ndarray) -> tuple[np.ndarray]:
        grad = np.fft.fftn(_to_complex(g), axes=[a - 1 for a in part_axes]) / total
        return (_to_parts(grad),)

    return ComplexTensor(_result("ifft", _to_parts(out), (w.parts,), _backward))
