#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Neural operators ``Q o sigma(W_t + K_t + b_t) o ... o P`` and their variants.

Every model consumes input fields stacked as ``(B, *grid, in_channels)``; the
lifting ``P`` sees ``(x, a(x))``. Models keep the keyword arguments they were
built with in ``hyperparameters`` so a checkpoint can rebuild them.
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Any, ClassVar

import numpy as np

from oarepo_neural_operator.errors import ConfigurationError, ContractError
from oarepo_neural_operator.grid import FieldSample, Grid
from oarepo_neural_operator.nop.graph import (
    build_ball_graph,
    build_multilevel_graph,
    build_orthogonal_multilevel_graph,
    partition_nodes,
)
from oarepo_neural_operator.nop.layers import (
    AttentionLayer,
    GraphKernelLayer,
    LowRankLayer,
    MultipoleLayer,
    SpectralLayer,
    SpectralLayer3d,
    deeponet_forward,
)
from oarepo_neural_operator.nop.module import FeedForward, Linear, Module
from oarepo_neural_operator.random_fields import Rng
from oarepo_neural_operator.tensor import Tensor, as_tensor, no_grad, ops

if TYPE_CHECKING:
    from collections.abc import Sequence

    from oarepo_neural_operator.nop.graph import MultiLevelGraph

logger = logging.getLogger(__name__)

EVAL_STREAM = 1


def grid_features(inputs: Any, grid: Grid) -> Tensor:
    """Concatenate coordinates ``x`` with input values ``a(x)`` along the channel axis."""
    inputs = as_tensor(inputs)
    coords = np.broadcast_to(grid.coordinates(), (inputs.shape[0], *grid.sizes, grid.dims))
    return ops.concat([Tensor(np.array(coords)), inputs], axis=-1)


class OperatorModel(Module):
    """Common interface of all operator models."""

    variant: ClassVar[str] = ""
    resolution_transferable: ClassVar[bool] = True
    supported_dims: ClassVar[tuple[int, ...]] = (1, 2)

    def __init__(self, **hyperparameters: Any) -> None:
        """Remember construction arguments."""
        self.hyperparameters = hyperparameters

    @property
    def in_channels(self) -> int:
        """Channels of the input function."""
        return int(self.hyperparameters["in_channels"])

    @property
    def out_channels(self) -> int:
        """Channels of the output function."""
        return int(self.hyperparameters["out_channels"])

    def check_grid(self, grid: Grid, channels: int) -> None:
        """Reject inputs the variant cannot handle."""
        if grid.dims != self.hyperparameters.get("dims", grid.dims) or grid.dims not in self.supported_dims:
            raise ConfigurationError(
                f"{self.variant} model built for {self.hyperparameters.get('dims')}-D inputs got a {grid.dims}-D grid"
            )
        if channels != self.in_channels:
            raise ConfigurationError(f"{self.variant} model expects {self.in_channels} input channels, got {channels}")

    def forward_batch(
        self, inputs: Any, grid: Grid, rng: Rng | None = None, steps: int | None = None
    ) -> Tensor:
        """Differentiable prediction on the full grid, shaped ``(B, *grid, out)``."""
        raise NotImplementedError

    def training_batch(
        self, inputs: np.ndarray, outputs: np.ndarray, grid: Grid, rng: Rng
    ) -> tuple[Tensor, np.ndarray]:
        """Prediction and matching truth flattened to ``(B, n, channels)`` for one training step."""
        pred = self.forward_batch(inputs, grid, rng, steps=outputs.shape[-1])
        batch = inputs.shape[0]
        return ops.reshape(pred, (batch, -1, pred.shape[-1])), outputs.reshape(batch, -1, outputs.shape[-1])

    def predict_batch(self, inputs: np.ndarray, grid: Grid, rng: Rng | None = None, steps: int | None = None):
        """Prediction without recording gradients."""
        with no_grad():
            return self.forward_batch(inputs, grid, rng, steps).numpy()

    def predict(self, a: FieldSample, rng: Rng | None = None, steps: int | None = None) -> FieldSample:
        """Apply the model to one input field."""
        return FieldSample(a.grid, self.predict_batch(a.values[None], a.grid, rng, steps)[0])

    def config(self) -> dict[str, Any]:
        """Variant tag and hyperparameters."""
        return {"variant": self.variant, **self.hyperparameters}


def model_forward(model: OperatorModel, a: FieldSample, rng: Rng | None = None) -> FieldSample:
    """Evaluate ``model`` on the input field ``a``."""
    return model.predict(a, rng)


class LiftedOperatorModel(OperatorModel):
    """Model with pointwise lifting ``P`` to ``width`` channels and a two-layer projection ``Q``."""

    def __init__(
        self,
        in_channels: int,
        out_channels: int,
        dims: int,
        width: int,
        layers: int,
        activation: str,
        projection_hidden: int,
        seed: int,
        lift_dims: int | None = None,
        **extra: Any,
    ) -> None:
        """Create ``P`` and ``Q``; subclasses append their kernel layers."""
        super().__init__(
            in_channels=in_channels,
            out_channels=out_channels,
            dims=dims,
            width=width,
            layers=layers,
            activation=activation,
            projection_hidden=projection_hidden,
            seed=seed,
            **extra,
        )
        if layers < 0:
            raise ConfigurationError(f"Layer count must be nonnegative, got {layers}", key="model.layers")
        self.rng = Rng(seed)
        self.width = width
        self.lift = Linear(in_channels + (lift_dims or dims), width, self.rng)
        self.project = FeedForward([width, projection_hidden, out_channels], self.rng, activation)


class FourierNeuralOperator(LiftedOperatorModel):
    """Fourier neural operator on uniform 1-D or 2-D grids.

    With ``autoregressive=True`` the model maps the previous ``in_channels``
    time steps to the next one and is rolled out to the requested horizon.
    """

    variant = "fno"

    def __init__(
        self,
        in_channels: int = 1,
        out_channels: int = 1,
        dims: int = 1,
        width: int | None = None,
        layers: int = 4,
        kmax: int | Sequence[int] | None = None,
        activation: str = "relu",
        projection_hidden: int = 128,
        seed: int = 0,
        autoregressive: bool = False,
    ) -> None:
        """Defaults follow the 1-D (kmax 16, width 64) and 2-D (kmax 12, width 32) setups."""
        width = width or (64 if dims == 1 else 32)
        kmax = kmax if kmax is not None else (16 if dims == 1 else 12)
        kmax = [int(kmax)] * dims if isinstance(kmax, int) else [int(k) for k in kmax]
        if len(kmax) != dims:
            raise ConfigurationError(f"Need {dims} mode cutoffs, got {kmax}", key="model.kmax")
        if autoregressive and out_channels != 1:
            raise ConfigurationError("Autoregressive models emit one step at a time", key="model.out_channels")
        super().__init__(
            in_channels, out_channels, dims, width, layers, activation, projection_hidden, seed,
            kmax=kmax, autoregressive=autoregressive,
        )
        self.layers = [SpectralLayer(width, kmax, self.rng, activation) for _ in range(layers)]

    def step(self, inputs: Any, grid: Grid) -> Tensor:
        """One application of the operator."""
        inputs = as_tensor(inputs)
        self.check_grid(grid, inputs.shape[-1])
        v = self.lift(grid_features(inputs, grid))
        for layer in self.layers:
            v = layer(v)
        return self.project(v)

    def rollout(self, inputs: Any, grid: Grid, steps: int) -> Tensor:
        """Autoregressive prediction of ``steps`` future steps, shaped ``(B, *grid, steps)``."""
        window = as_tensor(inputs)
        predictions = []
        for _ in range(steps):
            following = self.step(window, grid)
            predictions.append(following)
            window = ops.concat([window[..., 1:], following], axis=-1)
        return ops.concat(predictions, axis=-1)

    def forward_batch(self, inputs: Any, grid: Grid, rng: Rng | None = None, steps: int | None = None) -> Tensor:
        """Single application, or a rollout of ``steps`` steps for autoregressive models."""
        if self.hyperparameters["autoregressive"]:
            return self.rollout(inputs, grid, steps or 1)
        return self.step(inputs, grid)


class FourierNeuralOperator3d(LiftedOperatorModel):
    """Space-time Fourier neural operator for vorticity trajectories.

    The input history (``in_channels`` steps) is repeated along a time axis of
    ``steps`` points; features are ``(x, y, t, history)``.
    """

    variant = "fno3d"
    supported_dims = (2,)

    def __init__(
        self,
        in_channels: int = 10,
        out_channels: int = 1,
        dims: int = 2,
        width: int = 20,
        layers: int = 4,
        kmax: Sequence[int] = (8, 8, 8),
        time_steps: int = 40,
        pad_t: int = 6,
        activation: str = "relu",
        projection_hidden: int = 128,
        seed: int = 0,
    ) -> None:
        """Create the space-time layers."""
        if out_channels != 1:
            raise ConfigurationError(
                "Space-time model predicts one scalar per space-time point", key="model.out_channels"
            )
        super().__init__(
            in_channels, out_channels, dims, width, layers, activation, projection_hidden, seed,
            lift_dims=3, kmax=list(kmax), time_steps=time_steps, pad_t=pad_t,
        )
        self.layers = [SpectralLayer3d(width, kmax, self.rng, pad_t, activation) for _ in range(layers)]

    def forward_batch(self, inputs: Any, grid: Grid, rng: Rng | None = None, steps: int | None = None) -> Tensor:
        """Predict ``steps`` future snapshots as channels ``(B, s_x, s_y, steps)``."""
        inputs = as_tensor(inputs)
        self.check_grid(grid, inputs.shape[-1])
        steps = steps or int(self.hyperparameters["time_steps"])
        batch, (sx, sy) = inputs.shape[0], grid.sizes
        t = np.linspace(0.0, 1.0, steps + 1)[1:]
        coords = np.concatenate(
            [
                np.broadcast_to(grid.coordinates()[:, :, None, :], (sx, sy, steps, 2)),
                np.broadcast_to(t[None, None, :, None], (sx, sy, steps, 1)),
            ],
            axis=-1,
        )
        coords = Tensor(np.broadcast_to(coords, (batch, sx, sy, steps, 3)).copy())
        history = ops.reshape(inputs, (batch, sx, sy, 1, self.in_channels))
        history = ops.concat([history] * steps, axis=3)
        v = self.lift(ops.concat([coords, history], axis=-1))
        for layer in self.layers:
            v = layer(v)
        return ops.reshape(self.project(v), (batch, sx, sy, steps))


class GraphNeuralOperator(LiftedOperatorModel):
    """Graph kernel network on ball graphs of randomly subsampled nodes.

    Training uses one random subsample of ``subsample`` nodes per sample;
    prediction covers the grid with a random partition into groups of that size.
    """

    variant = "gno"

    def __init__(
        self,
        in_channels: int = 1,
        out_channels: int = 1,
        dims: int = 2,
        width: int = 32,
        layers: int = 4,
        radius: float = 0.25,
        subsample: int = 300,
        kernel_hidden: Sequence[int] = (256, 256, 256),
        activation: str = "relu",
        projection_hidden: int = 128,
        seed: int = 0,
    ) -> None:
        """Create kernel layers on edge features ``(x, y, a(x), a(y))``."""
        super().__init__(
            in_channels, out_channels, dims, width, layers, activation, projection_hidden, seed,
            radius=radius, subsample=subsample, kernel_hidden=list(kernel_hidden),
        )
        edge_dim = 2 * dims + 2 * in_channels
        self.layers = [GraphKernelLayer(width, edge_dim, self.rng, kernel_hidden, activation) for _ in range(layers)]

    def forward_nodes(self, points: np.ndarray, values: np.ndarray, node_index: np.ndarray) -> Tensor:
        """Prediction on the ball graph over ``node_index``."""
        graph, _ = build_ball_graph(points, values, self.hyperparameters["radius"], node_index=node_index)
        features = np.concatenate([points[node_index], values[node_index]], axis=1)
        v = self.lift(features)
        for layer in self.layers:
            v = layer(v, graph)
        return self.project(v)

    def forward_batch(self, inputs: Any, grid: Grid, rng: Rng | None = None, steps: int | None = None) -> Tensor:
        """Full-grid prediction assembled from a random partition of the nodes."""
        inputs = np.asarray(inputs, dtype=np.float64)
        self.check_grid(grid, inputs.shape[-1])
        rng = rng or Rng(self.hyperparameters["seed"], EVAL_STREAM)
        points, n = grid.points(), grid.num_points
        outputs = []
        for sample in inputs:
            values = sample.reshape(n, -1)
            groups = partition_nodes(n, self.hyperparameters["subsample"], rng)
            parts = [self.forward_nodes(points, values, group) for group in groups]
            outputs.append(ops.scatter_add(ops.concat(parts, axis=0), np.concatenate(groups), n, axis=0))
        return ops.reshape(ops.stack(outputs), (len(inputs), *grid.sizes, self.out_channels))

    def training_batch(
        self, inputs: np.ndarray, outputs: np.ndarray, grid: Grid, rng: Rng
    ) -> tuple[Tensor, np.ndarray]:
        """Predictions and truth on one random node subsample per sample."""
        self.check_grid(grid, inputs.shape[-1])
        points, n = grid.points(), grid.num_points
        k = min(self.hyperparameters["subsample"], n)
        preds, truths = [], []
        for a, u in zip(inputs, outputs, strict=True):
            nodes = np.sort(rng.choice(n, k)) if k < n else np.arange(n)
            preds.append(self.forward_nodes(points, a.reshape(n, -1), nodes))
            truths.append(u.reshape(n, -1)[nodes])
        return ops.stack(preds), np.stack(truths)


class LowRankNeuralOperator(LiftedOperatorModel):
    """Low-rank kernel network; integration costs ``O(J)`` on the full grid."""

    variant = "lno"

    def __init__(
        self,
        in_channels: int = 1,
        out_channels: int = 1,
        dims: int = 1,
        width: int = 32,
        layers: int = 4,
        rank: int = 4,
        factor_hidden: Sequence[int] = (64, 128),
        activation: str = "relu",
        projection_hidden: int = 128,
        seed: int = 0,
    ) -> None:
        """Create low-rank layers with factor networks on coordinates."""
        super().__init__(
            in_channels, out_channels, dims, width, layers, activation, projection_hidden, seed,
            rank=rank, factor_hidden=list(factor_hidden),
        )
        self.layers = [LowRankLayer(width, dims, rank, self.rng, factor_hidden, activation) for _ in range(layers)]

    def forward_batch(self, inputs: Any, grid: Grid, rng: Rng | None = None, steps: int | None = None) -> Tensor:
        """Prediction on all grid points."""
        inputs = as_tensor(inputs)
        self.check_grid(grid, inputs.shape[-1])
        batch, n = inputs.shape[0], grid.num_points
        points = grid.points()
        v = self.lift(ops.reshape(grid_features(inputs, grid), (batch, n, -1)))
        for layer in self.layers:
            v = layer(v, points)
        return ops.reshape(self.project(v), (batch, *grid.sizes, self.out_channels))


class MultipoleGraphNeuralOperator(LiftedOperatorModel):
    """Multipole graph kernel network: ``layers`` V-cycles over nested node levels.

    ``construction="random"`` samples nested random levels of ``level_sizes``
    nodes; ``construction="orthogonal"`` uses stride-``2**l`` subgrids of the
    full grid.
    """

    variant = "mgno"

    def __init__(
        self,
        in_channels: int = 1,
        out_channels: int = 1,
        dims: int = 2,
        width: int = 32,
        layers: int = 4,
        level_sizes: Sequence[int] = (400, 100, 25),
        radii: Sequence[float] = (0.1, 0.2, 0.4),
        construction: str = "random",
        kernel_hidden: Sequence[int] = (256, 256, 256),
        activation: str = "relu",
        projection_hidden: int = 128,
        seed: int = 0,
    ) -> None:
        """Create one :class:`MultipoleLayer` per V-cycle."""
        if construction not in ("random", "orthogonal"):
            raise ConfigurationError(f"Unknown multi-level construction {construction!r}", key="model.construction")
        if len(radii) != len(level_sizes):
            raise ConfigurationError("Need one radius per level", key="model.radii")
        super().__init__(
            in_channels, out_channels, dims, width, layers, activation, projection_hidden, seed,
            level_sizes=list(level_sizes), radii=list(radii), construction=construction,
            kernel_hidden=list(kernel_hidden),
        )
        edge_dim = 2 * dims + 2 * in_channels
        self.layers = [
            MultipoleLayer(width, edge_dim, len(level_sizes), self.rng, kernel_hidden, activation)
            for _ in range(layers)
        ]

    def forward_graph(self, points: np.ndarray, values: np.ndarray, graph: MultiLevelGraph) -> Tensor:
        """Prediction on the finest level of ``graph``."""
        nodes = graph.node_index
        v = self.lift(np.concatenate([points[nodes], values[nodes]], axis=1))
        v_hat = None
        for layer in self.layers:
            v, v_hat = layer(v, graph, v_hat)
        return self.project(v)

    def _graph(self, grid: Grid, points: np.ndarray, values: np.ndarray, rng: Rng, nodes: np.ndarray | None):
        hp = self.hyperparameters
        if hp["construction"] == "orthogonal":
            return build_orthogonal_multilevel_graph(grid.sizes, points, values, len(hp["level_sizes"]), hp["radii"])
        return build_multilevel_graph(points, values, hp["level_sizes"], hp["radii"], rng, node_index=nodes)

    def forward_batch(self, inputs: Any, grid: Grid, rng: Rng | None = None, steps: int | None = None) -> Tensor:
        """Full-grid prediction (partitioned into groups for the random construction)."""
        inputs = np.asarray(inputs, dtype=np.float64)
        self.check_grid(grid, inputs.shape[-1])
        rng = rng or Rng(self.hyperparameters["seed"], EVAL_STREAM)
        points, n = grid.points(), grid.num_points
        outputs = []
        for sample in inputs:
            values = sample.reshape(n, -1)
            if self.hyperparameters["construction"] == "orthogonal":
                outputs.append(self.forward_graph(points, values, self._graph(grid, points, values, rng, None)))
                continue
            groups = partition_nodes(n, self.hyperparameters["level_sizes"][0], rng)
            parts = [self.forward_graph(points, values, self._graph(grid, points, values, rng, g)) for g in groups]
            outputs.append(ops.scatter_add(ops.concat(parts, axis=0), np.concatenate(groups), n, axis=0))
        return ops.reshape(ops.stack(outputs), (len(inputs), *grid.sizes, self.out_channels))

    def training_batch(
        self, inputs: np.ndarray, outputs: np.ndarray, grid: Grid, rng: Rng
    ) -> tuple[Tensor, np.ndarray]:
        """Predictions and truth on one random multi-level graph per sample."""
        if self.hyperparameters["construction"] == "orthogonal":
            return super().training_batch(inputs, outputs, grid, rng)
        self.check_grid(grid, inputs.shape[-1])
        points, n = grid.points(), grid.num_points
        preds, truths = [], []
        for a, u in zip(inputs, outputs, strict=True):
            values = a.reshape(n, -1)
            graph = self._graph(grid, points, values, rng, None)
            preds.append(self.forward_graph(points, values, graph))
            truths.append(u.reshape(n, -1)[graph.node_index])
        return ops.stack(preds), np.stack(truths)


class AttentionNeuralOperator(LiftedOperatorModel):
    """Stack of attention kernel layers over all grid points."""

    variant = "attention"

    def __init__(
        self,
        in_channels: int = 1,
        out_channels: int = 1,
        dims: int = 1,
        width: int = 32,
        layers: int = 4,
        key_dim: int = 16,
        activation: str = "relu",
        projection_hidden: int = 128,
        seed: int = 0,
    ) -> None:
        """Create attention layers."""
        super().__init__(
            in_channels, out_channels, dims, width, layers, activation, projection_hidden, seed, key_dim=key_dim
        )
        self.layers = [AttentionLayer(width, self.rng, key_dim, activation=activation) for _ in range(layers)]

    def forward_batch(self, inputs: Any, grid: Grid, rng: Rng | None = None, steps: int | None = None) -> Tensor:
        """Prediction on all grid points."""
        inputs = as_tensor(inputs)
        self.check_grid(grid, inputs.shape[-1])
        batch, n = inputs.shape[0], grid.num_points
        v = self.lift(ops.reshape(grid_features(inputs, grid), (batch, n, -1)))
        for layer in self.layers:
            v = layer(v)
        return ops.reshape(self.project(v), (batch, *grid.sizes, self.out_channels))


class DeepONet(OperatorModel):
    """Branch/trunk network with sensors fixed at the training grid points."""

    variant = "deeponet"
    resolution_transferable = False

    def __init__(
        self,
        in_channels: int = 1,
        out_channels: int = 1,
        dims: int = 1,
        sensors: int = 0,
        latent: int = 64,
        branch_hidden: Sequence[int] = (128, 128),
        trunk_hidden: Sequence[int] = (128, 128),
        activation: str = "relu",
        seed: int = 0,
    ) -> None:
        """:param sensors: number of sensor values ``q`` (grid points times input channels)."""
        if sensors < 1:
            raise ConfigurationError("DeepONet needs the number of sensors of its training grid", key="model.sensors")
        super().__init__(
            in_channels=in_channels, out_channels=out_channels, dims=dims, sensors=sensors, latent=latent,
            branch_hidden=list(branch_hidden), trunk_hidden=list(trunk_hidden), activation=activation, seed=seed,
        )
        rng = Rng(seed)
        self.branch = FeedForward([sensors, *branch_hidden, latent * out_channels], rng, activation)
        self.trunk = FeedForward([dims, *trunk_hidden, latent], rng, activation)

    def forward_batch(self, inputs: Any, grid: Grid, rng: Rng | None = None, steps: int | None = None) -> Tensor:
        """Evaluate at every grid point; the input grid must match the sensor layout."""
        inputs = as_tensor(inputs)
        batch, channels, latent = inputs.shape[0], self.out_channels, self.hyperparameters["latent"]
        sensors = ops.reshape(inputs, (batch, -1))
        if sensors.shape[-1] != self.hyperparameters["sensors"]:
            raise ContractError(
                f"fixed-sensor architecture: DeepONet was trained with {self.hyperparameters['sensors']} sensors "
                f"and cannot evaluate inputs with {sensors.shape[-1]}"
            )

        def _branch(s: Tensor) -> Tensor:
            return ops.reshape(self.branch(s), (batch * channels, latent))

        values = deeponet_forward(sensors, grid.points(), _branch, self.trunk)
        values = ops.transpose(ops.reshape(values, (batch, channels, -1)), (0, 2, 1))
        return ops.reshape(values, (batch, *grid.sizes, channels))


class GreenKernelOperator(OperatorModel):
    """Single kernel layer ``u(x) = int kappa(x, y) f(y) dy`` with a scalar kernel network.

    Quadrature is the grid mean times the domain length.
    """

    variant = "green_kernel"
    supported_dims = (1,)

    def __init__(
        self,
        in_channels: int = 1,
        out_channels: int = 1,
        dims: int = 1,
        kernel_hidden: Sequence[int] = (64, 64, 64),
        activation: str = "relu",
        seed: int = 0,
    ) -> None:
        """Create the kernel network ``R^2 -> R``."""
        if in_channels != 1 or out_channels != 1 or dims != 1:
            raise ConfigurationError("Green kernel model maps scalar 1-D functions to scalar 1-D functions")
        super().__init__(
            in_channels=1, out_channels=1, dims=1, kernel_hidden=list(kernel_hidden), activation=activation, seed=seed
        )
        self.kernel = FeedForward([2, *kernel_hidden, 1], Rng(seed), activation)

    def kernel_tensor(self, xs: np.ndarray) -> Tensor:
        """``kappa(x_i, x_j)`` for all pairs of points."""
        xs = np.asarray(xs, dtype=np.float64).ravel()
        pairs = np.stack(np.meshgrid(xs, xs, indexing="ij"), axis=-1).reshape(-1, 2)
        return ops.reshape(self.kernel(pairs), (len(xs), len(xs)))

    def kernel_matrix(self, xs: np.ndarray) -> np.ndarray:
        """Learned kernel on a grid, for comparison with the Green's function."""
        with no_grad():
            return self.kernel_tensor(xs).numpy()

    def forward_batch(self, inputs: Any, grid: Grid, rng: Rng | None = None, steps: int | None = None) -> Tensor:
        """Quadrature of the kernel against the input on the grid."""
        inputs = as_tensor(inputs)
        self.check_grid(grid, inputs.shape[-1])
        n = grid.num_points
        kernel = self.kernel_tensor(grid.axis_coordinates(0))
        f = ops.reshape(inputs, (inputs.shape[0], n))
        u = ops.einsum("xy,by->bx", kernel, f) * (grid.lengths[0] / n)
        return ops.reshape(u, (inputs.shape[0], n, 1))


def build_model(config: dict[str, Any]) -> OperatorModel:
    """Instantiate the model described by ``{"variant": ..., **hyperparameters}``."""
    from oarepo_neural_operator.utils import get_model_class

    hyperparameters = dict(config)
    variant = hyperparameters.pop("variant", None)
    if variant is None:
        raise ConfigurationError("Model configuration has no variant", key="model.variant")
    model_class = get_model_class(variant)
    try:
        model = model_class(**hyperparameters)
    except TypeError as e:
        raise ConfigurationError(f"Invalid hyperparameters for {variant}: {e}", key="model") from e
    logger.info("Built %s model with %d parameters", variant, model.num_parameters())
    return model
