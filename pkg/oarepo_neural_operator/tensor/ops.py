#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Differentiable primitives.

Each primitive computes its result with numpy and, when any input requires a
gradient and recording is enabled, appends a node holding a closure that maps
the output gradient to input gradients. Broadcasting follows numpy's
trailing-dimension alignment.
"""

from __future__ import annotations

import math
from typing import TYPE_CHECKING, Any

import numpy as np
from scipy import special

from oarepo_neural_operator.errors import ConfigurationError, ContractError, DimensionError
from oarepo_neural_operator.tensor.tape import get_tape, is_recording
from oarepo_neural_operator.tensor.tensor import Tensor, as_tensor

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

Axis = int | tuple[int, ...] | None


def _result(
    op: str,
    data: np.ndarray,
    inputs: tuple[Tensor, ...],
    backward: Callable[[np.ndarray], tuple[np.ndarray | None, ...]],
) -> Tensor:
    requires_grad = is_recording() and any(t.requires_grad for t in inputs)
    out = Tensor(data, requires_grad=requires_grad)
    if requires_grad:
        get_tape().record(op, inputs, out, backward)
    return out


def _broadcast_shape(op: str, a: Tensor, b: Tensor) -> tuple[int, ...]:
    try:
        return tuple(np.broadcast_shapes(a.shape, b.shape))
    except ValueError as e:
        raise DimensionError(op, a.shape, b.shape) from e


def backward(loss: Tensor) -> dict[Tensor, np.ndarray]:
    """Differentiate scalar ``loss`` on the calling thread's tape."""
    return get_tape().backward(loss)


def add(a: Any, b: Any) -> Tensor:
    """Elementwise sum."""
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("add", a, b)
    return _result("add", a.data + b.data, (a, b), lambda g: (g, g))


def sub(a: Any, b: Any) -> Tensor:
    """Elementwise difference."""
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("sub", a, b)
    return _result("sub", a.data - b.data, (a, b), lambda g: (g, -g))


def mul(a: Any, b: Any) -> Tensor:
    """Elementwise product."""
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("mul", a, b)
    return _result("mul", a.data * b.data, (a, b), lambda g: (g * b.data, g * a.data))


def div(a: Any, b: Any) -> Tensor:
    """Elementwise quotient."""
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("div", a, b)
    out = a.data / b.data
    return _result("div", out, (a, b), lambda g: (g / b.data, -g * out / b.data))


def neg(a: Any) -> Tensor:
    """Elementwise negation."""
    a = as_tensor(a)
    return _result("neg", -a.data, (a,), lambda g: (-g,))


def power(a: Any, exponent: float) -> Tensor:
    """Elementwise power with a constant exponent."""
    a = as_tensor(a)
    out = a.data**exponent
    return _result("power", out, (a,), lambda g: (g * exponent * a.data ** (exponent - 1),))


def exp(a: Any) -> Tensor:
    """Elementwise exponential."""
    a = as_tensor(a)
    out = np.exp(a.data)
    return _result("exp", out, (a,), lambda g: (g * out,))


def log(a: Any) -> Tensor:
    """Elementwise natural logarithm."""
    a = as_tensor(a)
    return _result("log", np.log(a.data), (a,), lambda g: (g / a.data,))


def sqrt(a: Any) -> Tensor:
    """Elementwise square root."""
    a = as_tensor(a)
    out = np.sqrt(a.data)
    return _result("sqrt", out, (a,), lambda g: (0.5 * g / out,))


def tanh(a: Any) -> Tensor:
    """Elementwise hyperbolic tangent."""
    a = as_tensor(a)
    out = np.tanh(a.data)
    return _result("tanh", out, (a,), lambda g: (g * (1.0 - out * out),))


def relu(a: Any) -> Tensor:
    """Rectified linear unit ``max(x, 0)``."""
    a = as_tensor(a)
    mask = a.data > 0
    return _result("relu", np.where(mask, a.data, 0.0), (a,), lambda g: (g * mask,))


def gelu(a: Any) -> Tensor:
    """Gaussian error linear unit ``x * Phi(x)`` (exact, erf based)."""
    a = as_tensor(a)
    x = a.data
    cdf = 0.5 * (1.0 + special.erf(x / math.sqrt(2.0)))
    pdf = np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
    return _result("gelu", x * cdf, (a,), lambda g: (g * (cdf + x * pdf),))


def identity(a: Any) -> Tensor:
    """Return ``a`` unchanged."""
    return as_tensor(a)


def matmul(a: Any, b: Any) -> Tensor:
    """Matrix product over the last two axes with broadcast batch axes."""
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise DimensionError("matmul", a.shape, b.shape)
    try:
        out = np.matmul(a.data, b.data)
    except ValueError as e:
        raise DimensionError("matmul", a.shape, b.shape) from e

    def _backward(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return np.matmul(g, np.swapaxes(b.data, -1, -2)), np.matmul(np.swapaxes(a.data, -1, -2), g)

    return _result("matmul", out, (a, b), _backward)


def _parse_einsum(subscripts: str) -> tuple[str, str, str]:
    inputs, _, output = subscripts.replace(" ", "").partition("->")
    left, _, right = inputs.partition(",")
    if not left or not right:
        raise ContractError(f"einsum expects exactly two operands, got '{subscripts}'")
    for term in (left, right):
        if len(set(term)) != len(term):
            raise ContractError(f"einsum: repeated index within one operand in '{subscripts}'")
    for term, other in ((left, right), (right, left)):
        missing = set(term) - set(output) - set(other)
        if missing:
            raise ContractError(f"einsum: indices {sorted(missing)} are summed within a single operand")
    return left, right, output


def einsum(subscripts: str, a: Any, b: Any) -> Tensor:
    """Two-operand Einstein summation with explicit output subscripts."""
    a, b = as_tensor(a), as_tensor(b)
    left, right, output = _parse_einsum(subscripts)
    try:
        out = np.einsum(f"{left},{right}->{output}", a.data, b.data)
    except ValueError as e:
        raise DimensionError("einsum", a.shape, b.shape, detail=subscripts) from e

    def _backward(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return (
            np.einsum(f"{output},{right}->{left}", g, b.data),
            np.einsum(f"{left},{output}->{right}", a.data, g),
        )

    return _result("einsum", out, (a, b), _backward)


def reshape(a: Any, shape: Sequence[int]) -> Tensor:
    """Row-major reshape."""
    a = as_tensor(a)
    try:
        out = a.data.reshape(tuple(shape))
    except ValueError as e:
        raise DimensionError("reshape", a.shape, tuple(shape)) from e
    return _result("reshape", out, (a,), lambda g: (g.reshape(a.shape),))


def transpose(a: Any, axes: Sequence[int] | None = None) -> Tensor:
    """Permute axes."""
    a = as_tensor(a)
    perm = tuple(range(a.ndim))[::-1] if axes is None else tuple(axes)
    if sorted(perm) != list(range(a.ndim)):
        raise DimensionError("transpose", a.shape, perm)
    inverse = tuple(np.argsort(perm))
    return _result("transpose", np.transpose(a.data, perm), (a,), lambda g: (np.transpose(g, inverse),))


def moveaxis(a: Any, source: int, destination: int) -> Tensor:
    """Move one axis to a new position."""
    a = as_tensor(a)
    perm = list(range(a.ndim))
    perm.insert(destination % a.ndim, perm.pop(source % a.ndim))
    return transpose(a, perm)


def getitem(a: Any, key: Any) -> Tensor:
    """Numpy indexing (slices, integers, integer arrays)."""
    a = as_tensor(a)
    try:
        out = a.data[key]
    except IndexError as e:
        raise DimensionError("getitem", a.shape, detail=str(key)) from e

    keys = key if isinstance(key, tuple) else (key,)
    basic = all(k is None or k is Ellipsis or isinstance(k, int | slice) for k in keys)

    def _backward(g: np.ndarray) -> tuple[np.ndarray]:
        grad = np.zeros_like(a.data)
        if basic:
            grad[key] += g
        else:
            np.add.at(grad, key, g)
        return (grad,)

    return _result("getitem", np.array(out, copy=True), (a,), _backward)


def concat(tensors: Sequence[Any], axis: int = 0) -> Tensor:
    """Join tensors along an existing axis."""
    parts = tuple(as_tensor(t) for t in tensors)
    try:
        out = np.concatenate([t.data for t in parts], axis=axis)
    except ValueError as e:
        raise DimensionError("concat", *(t.shape for t in parts)) from e
    offsets = np.cumsum([0] + [t.shape[axis] for t in parts])

    def _backward(g: np.ndarray) -> tuple[np.ndarray, ...]:
        return tuple(
            np.take(g, np.arange(offsets[i], offsets[i + 1]), axis=axis) for i in range(len(parts))
        )

    return _result("concat", out, parts, _backward)


def stack(tensors: Sequence[Any], axis: int = 0) -> Tensor:
    """Join tensors along a new axis."""
    parts = [as_tensor(t) for t in tensors]
    expanded = []
    for t in parts:
        shape = list(t.shape)
        shape.insert(axis % (t.ndim + 1), 1)
        expanded.append(reshape(t, shape))
    return concat(expanded, axis=axis)


def _scatter_add_np(values: np.ndarray, index: np.ndarray, axis: int, size: int) -> np.ndarray:
    shape = list(values.shape)
    shape[axis] = size
    out = np.zeros(shape, dtype=values.dtype)
    np.add.at(np.moveaxis(out, axis, 0), index, np.moveaxis(values, axis, 0))
    return out


def gather(a: Any, index: Any, axis: int = 0) -> Tensor:
    """Select entries of ``a`` along ``axis`` by an integer index list."""
    a = as_tensor(a)
    index = np.asarray(index, dtype=np.intp)
    axis = axis % a.ndim
    if index.ndim != 1:
        raise DimensionError("gather", a.shape, index.shape, detail="index must be one-dimensional")
    if index.size and (index.min() < -a.shape[axis] or index.max() >= a.shape[axis]):
        raise DimensionError("gather", a.shape, index.shape, detail=f"index out of range on axis {axis}")
    size = a.shape[axis]
    out = np.take(a.data, index, axis=axis)
    return _result("gather", out, (a,), lambda g: (_scatter_add_np(g, index % size, axis, size),))


def scatter_add(a: Any, index: Any, size: int, axis: int = 0) -> Tensor:
    """Sum slices of ``a`` into ``size`` buckets along ``axis`` according to ``index``."""
    a = as_tensor(a)
    index = np.asarray(index, dtype=np.intp)
    axis = axis % a.ndim
    if index.ndim != 1 or index.shape[0] != a.shape[axis]:
        raise DimensionError("scatter_add", a.shape, index.shape)
    if index.size and (index.min() < 0 or index.max() >= size):
        raise DimensionError("scatter_add", a.shape, index.shape, detail=f"index out of range for size {size}")
    out = _scatter_add_np(a.data, index, axis, size)
    return _result("scatter_add", out, (a,), lambda g: (np.take(g, index, axis=axis),))


def _normalize_axes(axis: Axis, ndim: int) -> tuple[int, ...]:
    if axis is None:
        return tuple(range(ndim))
    if isinstance(axis, int):
        return (axis % ndim,)
    return tuple(a % ndim for a in axis)


def _expand_grad(g: np.ndarray, shape: tuple[int, ...], axes: tuple[int, ...], keepdims: bool) -> np.ndarray:
    if not keepdims:
        g = np.expand_dims(g, axes)
    return np.broadcast_to(g, shape)


def reduce_sum(a: Any, axis: Axis = None, keepdims: bool = False) -> Tensor:
    """Sum over the given axes."""
    a = as_tensor(a)
    axes = _normalize_axes(axis, a.ndim)
    out = np.sum(a.data, axis=axes, keepdims=keepdims)
    return _result(
        "sum", np.asarray(out), (a,), lambda g: (np.array(_expand_grad(g, a.shape, axes, keepdims)),)
    )


def reduce_mean(a: Any, axis: Axis = None, keepdims: bool = False) -> Tensor:
    """Arithmetic mean over the given axes."""
    a = as_tensor(a)
    axes = _normalize_axes(axis, a.ndim)
    count = int(np.prod([a.shape[i] for i in axes])) if axes else 1
    out = np.mean(a.data, axis=axes, keepdims=keepdims) if axes else a.data.copy()
    return _result(
        "mean",
        np.asarray(out),
        (a,),
        lambda g: (np.array(_expand_grad(g, a.shape, axes, keepdims)) / count,),
    )


def reduce_max(a: Any, axis: Axis = None, keepdims: bool = False) -> Tensor:
    """Maximum over the given axes; ties share the gradient equally."""
    a = as_tensor(a)
    axes = _normalize_axes(axis, a.ndim)
    kept = np.max(a.data, axis=axes, keepdims=True)
    out = kept if keepdims else np.squeeze(kept, axis=axes)

    def _backward(g: np.ndarray) -> tuple[np.ndarray]:
        mask = (a.data == kept).astype(np.float64)
        mask /= np.sum(mask, axis=axes, keepdims=True)
        return (mask * _expand_grad(g, a.shape, axes, keepdims),)

    return _result("max", np.asarray(out), (a,), _backward)


def softmax(a: Any, axis: int = -1) -> Tensor:
    """Numerically shifted softmax along ``axis``."""
    a = as_tensor(a)
    shift = Tensor(np.max(a.data, axis=axis, keepdims=True))
    e = exp(a - shift)
    return e / reduce_sum(e, axis=axis, keepdims=True)


ACTIVATIONS: dict[str, Callable[[Any], Tensor]] = {
    "relu": relu,
    "gelu": gelu,
    "tanh": tanh,
    "identity": identity,
}


def activation(name: str) -> Callable[[Any], Tensor]:
    """Look up an activation by name."""
    try:
        return ACTIVATIONS[name]
    except KeyError:
        raise ConfigurationError(
            f"Unknown activation '{name}', expected one of {sorted(ACTIVATIONS)}", key="activation"
        ) from None
