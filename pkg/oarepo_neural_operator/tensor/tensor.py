#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Dense float64 tensor participating in the differentiation tape."""

from __future__ import annotations

import itertools
from typing import TYPE_CHECKING, Any

import numpy as np

if TYPE_CHECKING:
    from oarepo_neural_operator.tensor.tape import TapeNode

_uids = itertools.count()


class Tensor:
    """N-dimensional array of 64-bit floats with optional gradient tracking.

    Tensors compare by identity so they can be used as dictionary keys
    (gradient maps, optimizer state); elementwise comparison goes through
    :meth:`numpy`.
    """

    __array_priority__ = 1000

    def __init__(self, data: Any, requires_grad: bool = False, name: str | None = None) -> None:
        """Wrap ``data`` as a float64 array.

        :param data: Anything accepted by :func:`numpy.asarray`.
        :param requires_grad: Whether this tensor is a trainable leaf.
        :param name: Optional name used in error messages and checkpoints.
        """
        self.data: np.ndarray = np.asarray(data, dtype=np.float64)
        self.requires_grad = requires_grad
        self.grad: np.ndarray | None = None
        self.tape_node: TapeNode | None = None
        self.name = name
        self.uid = next(_uids)

    def __repr__(self) -> str:
        """Return a short description."""
        label = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}{label}, requires_grad={self.requires_grad})"

    @property
    def shape(self) -> tuple[int, ...]:
        """Extents per axis."""
        return tuple(self.data.shape)

    @property
    def ndim(self) -> int:
        """Number of axes."""
        return self.data.ndim

    @property
    def size(self) -> int:
        """Number of elements, equal to the product of the shape."""
        return int(self.data.size)

    def numpy(self) -> np.ndarray:
        """Return the underlying array (not a copy)."""
        return self.data

    def item(self) -> float:
        """Return the value of a one-element tensor."""
        return float(self.data.reshape(-1)[0])

    def detach(self) -> Tensor:
        """Return a constant tensor sharing the data."""
        return Tensor(self.data)

    def zero_grad(self) -> None:
        """Forget the stored gradient."""
        self.grad = None

    def backward(self) -> dict[Tensor, np.ndarray]:
        """Differentiate this scalar with respect to all reachable leaves."""
        return ops.backward(self)

    def __add__(self, other: Any) -> Tensor:
        return ops.add(self, other)

    def __radd__(self, other: Any) -> Tensor:
        return ops.add(other, self)

    def __sub__(self, other: Any) -> Tensor:
        return ops.sub(self, other)

    def __rsub__(self, other: Any) -> Tensor:
        return ops.sub(other, self)

    def __mul__(self, other: Any) -> Tensor:
        return ops.mul(self, other)

    def __rmul__(self, other: Any) -> Tensor:
        return ops.mul(other, self)

    def __truediv__(self, other: Any) -> Tensor:
        return ops.div(self, other)

    def __rtruediv__(self, other: Any) -> Tensor:
        return ops.div(other, self)

    def __neg__(self) -> Tensor:
        return ops.neg(self)

    def __pow__(self, exponent: float) -> Tensor:
        return ops.power(self, exponent)

    def __matmul__(self, other: Any) -> Tensor:
        return ops.matmul(self, other)

    def __rmatmul__(self, other: Any) -> Tensor:
        return ops.matmul(other, self)

    def __getitem__(self, key: Any) -> Tensor:
        return ops.getitem(self, key)

    def sum(self, axis: int | tuple[int, ...] | None = None, keepdims: bool = False) -> Tensor:
        """Sum over ``axis`` (all axes by default)."""
        return ops.reduce_sum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis: int | tuple[int, ...] | None = None, keepdims: bool = False) -> Tensor:
        """Mean over ``axis`` (all axes by default)."""
        return ops.reduce_mean(self, axis=axis, keepdims=keepdims)

    def max(self, axis: int | tuple[int, ...] | None = None, keepdims: bool = False) -> Tensor:
        """Maximum over ``axis`` (all axes by default)."""
        return ops.reduce_max(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape: int) -> Tensor:
        """Return the same elements in a new row-major shape."""
        if len(shape) == 1 and isinstance(shape[0], tuple | list):
            shape = tuple(shape[0])
        return ops.reshape(self, shape)

    def transpose(self, *axes: int) -> Tensor:
        """Permute axes (reverse order when no axes are given)."""
        if len(axes) == 1 and isinstance(axes[0], tuple | list):
            axes = tuple(axes[0])
        return ops.transpose(self, axes or None)

    def relu(self) -> Tensor:
        """Rectified linear unit."""
        return ops.relu(self)


def as_tensor(value: Any) -> Tensor:
    """Return ``value`` unchanged if it is a tensor, else wrap it as a constant."""
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


from oarepo_neural_operator.tensor import ops  # noqa: E402
