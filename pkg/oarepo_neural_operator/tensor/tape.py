#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Reverse-mode differentiation tape.

Every thread owns one tape. Operations on tensors that require gradients
append a :class:`TapeNode` in execution order; :meth:`Tape.backward` walks the
nodes in exact reverse order and consumes the tape.
"""

from __future__ import annotations

import contextlib
import dataclasses
import logging
import threading
from typing import TYPE_CHECKING

import numpy as np

from oarepo_neural_operator.errors import ContractError, UnsupportedError

if TYPE_CHECKING:
    from collections.abc import Callable, Iterator

    from oarepo_neural_operator.tensor.tensor import Tensor

logger = logging.getLogger(__name__)


@dataclasses.dataclass
class TapeNode:
    """One recorded primitive application."""

    op: str
    inputs: tuple[Tensor, ...]
    output: Tensor
    backward: Callable[[np.ndarray], tuple[np.ndarray | None, ...]]
    index: int
    generation: int


class Tape:
    """Ordered record of primitive applications confined to one thread."""

    def __init__(self) -> None:
        """Create an empty tape."""
        self.nodes: list[TapeNode] = []
        self.generation = 0

    def __len__(self) -> int:
        """Return the number of recorded nodes."""
        return len(self.nodes)

    def record(
        self,
        op: str,
        inputs: tuple[Tensor, ...],
        output: Tensor,
        backward: Callable[[np.ndarray], tuple[np.ndarray | None, ...]],
    ) -> TapeNode:
        """Append a node and attach it to ``output``."""
        node = TapeNode(
            op=op,
            inputs=inputs,
            output=output,
            backward=backward,
            index=len(self.nodes),
            generation=self.generation,
        )
        self.nodes.append(node)
        output.tape_node = node
        return node

    def reset(self) -> None:
        """Drop all nodes; tensors recorded so far can no longer be differentiated."""
        self.nodes = []
        self.generation += 1

    def backward(self, loss: Tensor) -> dict[Tensor, np.ndarray]:
        """Differentiate a scalar ``loss`` with respect to every reachable leaf.

        Leaves receive their gradient in ``.grad``; the same arrays are
        returned keyed by tensor. The tape is consumed afterwards.

        :raises ContractError: If ``loss`` is not a scalar.
        :raises UnsupportedError: If ``loss`` was recorded on an already consumed tape
            or depends on a tensor recorded on one.
        """
        if loss.data.size != 1:
            raise ContractError(f"backward expects a scalar loss, got shape {loss.shape}")

        node = loss.tape_node
        if node is None:
            # nothing recorded: the loss does not depend on any trainable leaf
            if loss.requires_grad:
                loss.grad = np.ones_like(loss.data)
                return {loss: loss.grad}
            return {}
        if node.generation != self.generation:
            raise UnsupportedError("double backward is not supported: the tape of this loss was already consumed")

        logger.debug("Backward over %s recorded nodes", node.index + 1)
        grads: dict[int, np.ndarray] = {loss.uid: np.ones_like(loss.data)}
        leaves: dict[int, Tensor] = {}
        for current in reversed(self.nodes[: node.index + 1]):
            grad_out = grads.pop(current.output.uid, None)
            if grad_out is None:
                continue
            input_grads = current.backward(grad_out)
            for tensor, grad in zip(current.inputs, input_grads, strict=True):
                if grad is None or not tensor.requires_grad:
                    continue
                if tensor.tape_node is not None and tensor.tape_node.generation != self.generation:
                    self.reset()
                    raise UnsupportedError(
                        f"{current.op} uses a tensor recorded on an already consumed tape; recompute it"
                    )
                grad = unbroadcast(grad, tensor.shape)
                if tensor.uid in grads:
                    grads[tensor.uid] = grads[tensor.uid] + grad
                else:
                    grads[tensor.uid] = grad
                if tensor.tape_node is None:
                    leaves[tensor.uid] = tensor

        result: dict[Tensor, np.ndarray] = {}
        for uid, leaf in leaves.items():
            leaf.grad = grads[uid]
            result[leaf] = leaf.grad
        self.reset()
        return result


def unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum ``grad`` down to ``shape`` after trailing-dimension broadcasting."""
    if grad.shape == tuple(shape):
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


_state = threading.local()


def get_tape() -> Tape:
    """Return the tape of the calling thread, creating it on first use."""
    tape = getattr(_state, "tape", None)
    if tape is None:
        tape = Tape()
        _state.tape = tape
    return tape


def is_recording() -> bool:
    """Whether operations in this thread are currently recorded."""
    return getattr(_state, "enabled", True)


@contextlib.contextmanager
def no_grad() -> Iterator[None]:
    """Disable recording for the enclosed block (evaluation, solvers)."""
    previous = is_recording()
    _state.enabled = False
    try:
        yield
    finally:
        _state.enabled = previous
