#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Per-channel Gaussian normalisation of model inputs and outputs."""

from __future__ import annotations

import dataclasses
from typing import TYPE_CHECKING, Any

import numpy as np

from oarepo_neural_operator.errors import ConfigurationError
from oarepo_neural_operator.nop.models import OperatorModel
from oarepo_neural_operator.tensor import Tensor, as_tensor, ops

if TYPE_CHECKING:
    from oarepo_neural_operator.grid import Grid
    from oarepo_neural_operator.random_fields import Rng


@dataclasses.dataclass(frozen=True)
class UnitGaussianNormalizer:
    """``(x - mean) / (std + eps)`` applied pointwise with one mean/std per channel.

    A pooled normalizer holds a single mean/std shared by every channel, so it
    applies to any number of channels (time steps of a trajectory).
    """

    mean: np.ndarray
    std: np.ndarray
    eps: float = 1e-5

    @classmethod
    def fit(cls, values: np.ndarray, eps: float = 1e-5, pooled: bool = False) -> UnitGaussianNormalizer:
        """Statistics over samples and grid points of ``(N, *grid, channels)``.

        :param pooled: also pool over channels, giving statistics of shape ``(1,)``
        """
        values = np.asarray(values, dtype=np.float64)
        if pooled:
            return cls(np.array([values.mean()]), np.array([values.std()]), eps)
        axes = tuple(range(values.ndim - 1))
        return cls(values.mean(axis=axes), values.std(axis=axes), eps)

    def encode(self, values: Any) -> Any:
        """Normalise; tensors stay differentiable."""
        if isinstance(values, Tensor):
            return ops.div(ops.sub(values, self.mean), self.std + self.eps)
        return (np.asarray(values, dtype=np.float64) - self.mean) / (self.std + self.eps)

    def decode(self, values: Any) -> Any:
        """Undo :meth:`encode`; tensors stay differentiable."""
        if isinstance(values, Tensor):
            return ops.add(ops.mul(values, self.std + self.eps), self.mean)
        return np.asarray(values, dtype=np.float64) * (self.std + self.eps) + self.mean

    def to_dict(self) -> dict[str, Any]:
        """JSON friendly form."""
        return {"mean": self.mean.tolist(), "std": self.std.tolist(), "eps": self.eps}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> UnitGaussianNormalizer:
        """Inverse of :meth:`to_dict`."""
        return cls(np.asarray(data["mean"], dtype=np.float64), np.asarray(data["std"], dtype=np.float64), data["eps"])


def emits_trajectory(model: OperatorModel) -> bool:
    """Whether the output channels of ``model`` are time steps of a requested horizon."""
    return model.variant == "fno3d" or bool(model.hyperparameters.get("autoregressive", False))


class NormalizedModel(OperatorModel):
    """Wraps a model so it sees normalised inputs and emits decoded outputs.

    Autoregressive models are rolled out here: every step is decoded to
    physical units before it joins the history window, and the window is
    re-encoded before the next step.
    """

    def __init__(
        self,
        model: OperatorModel,
        input_normalizer: UnitGaussianNormalizer,
        output_normalizer: UnitGaussianNormalizer,
    ) -> None:
        """Wrap ``model``; its parameters keep their names under ``model.``."""
        super().__init__(**model.hyperparameters)
        self.model = model
        self.input_normalizer = input_normalizer
        self.output_normalizer = output_normalizer
        self.resolution_transferable = model.resolution_transferable

    @classmethod
    def fit(cls, model: OperatorModel, inputs: np.ndarray, outputs: np.ndarray) -> NormalizedModel:
        """Wrap ``model`` with statistics of the training data.

        Trajectory outputs get pooled statistics so any horizon can be decoded.
        """
        return cls(
            model,
            UnitGaussianNormalizer.fit(inputs),
            UnitGaussianNormalizer.fit(outputs, pooled=emits_trajectory(model)),
        )

    @property
    def variant(self) -> str:  # type: ignore[override]
        """Variant of the wrapped model."""
        return self.model.variant

    @property
    def autoregressive(self) -> bool:
        """Whether the wrapped model is rolled out one step at a time."""
        return bool(self.model.hyperparameters.get("autoregressive", False))

    def normalizers(self) -> dict[str, Any]:
        """Statistics for the checkpoint manifest."""
        return {"input": self.input_normalizer.to_dict(), "output": self.output_normalizer.to_dict()}

    def _check_horizon(self, steps: int) -> None:
        fitted = self.output_normalizer.mean.shape[-1]
        if fitted != 1 and (self.autoregressive or fitted != steps):
            raise ConfigurationError(
                f"Output statistics cover {fitted} fixed time steps; "
                "refit the normalizer with pooled statistics to predict other horizons",
                key="train.normalize",
            )

    def rollout(self, inputs: Any, grid: Grid, steps: int) -> Tensor:
        """Autoregressive prediction in physical units, shaped ``(B, *grid, steps)``."""
        self._check_horizon(1)
        window = as_tensor(inputs)
        predictions = []
        for _ in range(steps):
            following = self.output_normalizer.decode(self.model.step(self.input_normalizer.encode(window), grid))
            predictions.append(following)
            window = ops.concat([window[..., 1:], following], axis=-1)
        return ops.concat(predictions, axis=-1)

    def forward_batch(self, inputs: Any, grid: Grid, rng: Rng | None = None, steps: int | None = None) -> Tensor:
        """Encode, apply the wrapped model, decode."""
        if self.autoregressive:
            return self.rollout(inputs, grid, steps or 1)
        if steps is not None and emits_trajectory(self.model):
            self._check_horizon(steps)
        encoded = self.input_normalizer.encode(inputs.numpy() if isinstance(inputs, Tensor) else inputs)
        return self.output_normalizer.decode(self.model.forward_batch(encoded, grid, rng, steps))

    def training_batch(
        self, inputs: np.ndarray, outputs: np.ndarray, grid: Grid, rng: Rng
    ) -> tuple[Tensor, np.ndarray]:
        """Training pair of the wrapped model in the original units."""
        if self.autoregressive:
            return super().training_batch(inputs, outputs, grid, rng)
        pred, truth = self.model.training_batch(
            self.input_normalizer.encode(inputs), self.output_normalizer.encode(outputs), grid, rng
        )
        return self.output_normalizer.decode(pred), self.output_normalizer.decode(truth)
