#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Parameter containers and pointwise networks."""

from __future__ import annotations

from typing import TYPE_CHECKING, Any

import numpy as np

from oarepo_neural_operator.errors import ConfigurationError, ContractError
from oarepo_neural_operator.tensor import Tensor, as_tensor, ops

if TYPE_CHECKING:
    from collections.abc import Iterator, Sequence

    from oarepo_neural_operator.random_fields import Rng


class Parameter(Tensor):
    """Trainable leaf tensor."""

    def __init__(self, data: Any, name: str | None = None) -> None:
        """Create a parameter holding a copy of ``data``."""
        super().__init__(np.array(data, dtype=np.float64), requires_grad=True, name=name)


def uniform_init(rng: Rng, shape: Sequence[int], bound: float) -> np.ndarray:
    """Uniform draws on ``(-bound, bound)``."""
    return rng.uniform(-bound, bound, tuple(shape))


class Module:
    """Base class for anything holding parameters.

    Parameters are discovered from instance attributes in assignment order:
    :class:`Parameter` values, nested modules and lists of modules.
    """

    def __call__(self, *args: Any, **kwargs: Any) -> Any:
        """Run :meth:`forward`."""
        return self.forward(*args, **kwargs)

    def forward(self, *args: Any, **kwargs: Any) -> Any:
        """Compute the module output."""
        raise NotImplementedError

    def _children(self) -> Iterator[tuple[str, Any]]:
        for name, value in vars(self).items():
            if isinstance(value, Parameter | Module):
                yield name, value
            elif isinstance(value, list | tuple):
                for i, item in enumerate(value):
                    if isinstance(item, Parameter | Module):
                        yield f"{name}.{i}", item

    def named_parameters(self, prefix: str = "") -> list[tuple[str, Parameter]]:
        """Parameters with dotted names in a stable order."""
        out = []
        for name, value in self._children():
            full = f"{prefix}{name}"
            if isinstance(value, Parameter):
                out.append((full, value))
            else:
                out.extend(value.named_parameters(prefix=f"{full}."))
        return out

    def parameters(self) -> list[Parameter]:
        """Parameters in the order of :meth:`named_parameters`."""
        return [p for _, p in self.named_parameters()]

    def num_parameters(self) -> int:
        """Total number of scalar parameters."""
        return sum(p.size for p in self.parameters())

    def state_dict(self) -> dict[str, np.ndarray]:
        """Copies of all parameter values keyed by name."""
        return {name: p.data.copy() for name, p in self.named_parameters()}

    def load_state_dict(self, state: dict[str, np.ndarray]) -> None:
        """Overwrite parameter values in place.

        :raises ContractError: on missing, unexpected or mis-shaped entries
        """
        named = dict(self.named_parameters())
        missing = sorted(set(named) - set(state))
        unexpected = sorted(set(state) - set(named))
        if missing or unexpected:
            raise ContractError(f"Parameter mismatch: missing {missing}, unexpected {unexpected}")
        for name, param in named.items():
            value = np.asarray(state[name], dtype=np.float64)
            if value.shape != param.shape:
                raise ContractError(f"Parameter {name} has shape {param.shape}, checkpoint holds {value.shape}")
            param.data = value.copy()

    def zero_grad(self) -> None:
        """Clear gradients of all parameters."""
        for p in self.parameters():
            p.zero_grad()


class Linear(Module):
    """Affine map ``x W + b`` acting on the last axis."""

    def __init__(self, in_features: int, out_features: int, rng: Rng, bias: bool = True) -> None:
        """Initialise with ``uniform(-1/sqrt(fan_in), 1/sqrt(fan_in))`` entries."""
        if in_features < 1 or out_features < 1:
            raise ConfigurationError(f"Linear layer needs positive sizes, got {in_features}x{out_features}")
        self.in_features = in_features
        self.out_features = out_features
        bound = 1.0 / np.sqrt(in_features)
        self.weight = Parameter(uniform_init(rng, (in_features, out_features), bound))
        self.bias = Parameter(uniform_init(rng, (out_features,), bound)) if bias else None

    def forward(self, x: Any) -> Tensor:
        """Apply to ``x`` of shape ``(..., in_features)``."""
        x = as_tensor(x)
        if x.shape[-1] != self.in_features:
            raise ConfigurationError(f"Linear layer expects {self.in_features} features, got shape {x.shape}")
        lead = x.shape[:-1]
        flat = ops.reshape(x, (int(np.prod(lead)) if lead else 1, self.in_features))
        out = ops.matmul(flat, self.weight)
        if self.bias is not None:
            out = out + self.bias
        return ops.reshape(out, (*lead, self.out_features))


class FeedForward(Module):
    """Stack of :class:`Linear` layers with an activation between them (none after the last)."""

    def __init__(self, sizes: Sequence[int], rng: Rng, activation: str = "relu") -> None:
        """Create layers ``sizes[0] -> sizes[1] -> ... -> sizes[-1]``."""
        if len(sizes) < 2:
            raise ConfigurationError(f"Feed-forward network needs at least two sizes, got {list(sizes)}")
        self.sizes = tuple(int(s) for s in sizes)
        self.activation = activation
        self.sigma = ops.activation(activation)
        self.layers = [Linear(a, b, rng) for a, b in zip(self.sizes[:-1], self.sizes[1:], strict=True)]

    def forward(self, x: Any) -> Tensor:
        """Apply the network pointwise over leading axes."""
        out = as_tensor(x)
        for i, layer in enumerate(self.layers):
            out = layer(out)
            if i < len(self.layers) - 1:
                out = self.sigma(out)
        return out


class KernelNet(FeedForward):
    """Feed-forward network mapping edge features to ``out x in`` kernel matrices."""

    def __init__(
        self,
        in_features: int,
        out_channels: int,
        in_channels: int,
        rng: Rng,
        hidden: Sequence[int] = (256, 256, 256),
        activation: str = "relu",
    ) -> None:
        """Three hidden layers of width 256 by default."""
        super().__init__([in_features, *hidden, out_channels * in_channels], rng, activation)
        self.out_channels = out_channels
        self.in_channels = in_channels

    def forward(self, features: Any) -> Tensor:
        """Kernel matrices shaped ``(E, out_channels, in_channels)``."""
        flat = super().forward(features)
        return ops.reshape(flat, (flat.shape[0], self.out_channels, self.in_channels))
