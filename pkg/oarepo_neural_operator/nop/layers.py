#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Kernel integral layers ``v -> sigma(W v + K v + b)``.

Each family exists as a plain function taking explicit weights (used by the
equivalence tests) and as a :class:`Module` owning its parameters.
"""

from __future__ import annotations

import math
from typing import TYPE_CHECKING, Any

import numpy as np

from oarepo_neural_operator.errors import ConfigurationError, ContractError
from oarepo_neural_operator.nop.module import FeedForward, KernelNet, Linear, Module, Parameter, uniform_init
from oarepo_neural_operator.spectral import ModeSet, enforce_conjugate_symmetry, pad_modes, truncate_modes
from oarepo_neural_operator.tensor import ComplexTensor, Tensor, as_tensor, complex_einsum, fft, ifft, ops

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from oarepo_neural_operator.nop.graph import Graph, MultiLevelGraph
    from oarepo_neural_operator.random_fields import Rng

    Activation = Callable[[Any], Tensor]
    KernelFn = Callable[[Any], Tensor]


def _affine(v: Tensor, weight: Any, bias: Any) -> Tensor:
    """Pointwise ``v W + b`` over the last axis; ``None`` weight means zero."""
    if weight is None:
        out = v * 0.0
    elif isinstance(weight, Linear):
        return weight(v)
    else:
        weight = as_tensor(weight)
        lead = v.shape[:-1]
        flat = ops.reshape(v, (int(np.prod(lead)) if lead else 1, v.shape[-1]))
        out = ops.reshape(ops.matmul(flat, weight), (*lead, weight.shape[-1]))
    if bias is not None:
        out = out + bias
    return out


# --- graph kernel ---------------------------------------------------------------------------


def kernel_integral(v: Any, graph: Graph, kernel_values: Tensor) -> Tensor:
    """Mean over neighbours of ``kappa(e(x, y)) v(y)`` for every destination ``x``."""
    v = as_tensor(v)
    messages = ops.einsum("eoi,ei->eo", kernel_values, ops.gather(v, graph.src, axis=0))
    summed = ops.scatter_add(messages, graph.dst, graph.num_dst, axis=0)
    degree = np.maximum(graph.degree, 1.0)[:, None]
    return summed / degree


def gno_layer(v: Any, graph: Graph, kernel: KernelFn, weight: Any, bias: Any, sigma: Activation) -> Tensor:
    """Message passing update ``sigma(W v(x) + mean_{y in N(x)} kappa(e(x, y)) v(y) + b)``."""
    v = as_tensor(v)
    return sigma(_affine(v, weight, bias) + kernel_integral(v, graph, kernel(graph.edge_features)))


class GraphKernelLayer(Module):
    """Graph neural operator layer with a learned edge kernel."""

    def __init__(
        self,
        width: int,
        edge_dim: int,
        rng: Rng,
        kernel_hidden: Sequence[int] = (256, 256, 256),
        activation: str = "relu",
    ) -> None:
        """Create the kernel network and the local linear map."""
        self.kernel = KernelNet(edge_dim, width, width, rng, kernel_hidden, activation)
        self.linear = Linear(width, width, rng)
        self.sigma = ops.activation(activation)

    def forward(self, v: Any, graph: Graph) -> Tensor:
        """Update node features ``(num_nodes, width)``."""
        return gno_layer(v, graph, self.kernel, self.linear, None, self.sigma)


# --- low rank --------------------------------------------------------------------------------


def lno_layer(
    v: Any,
    points: Any,
    phi: KernelFn,
    psi: KernelFn,
    rank: int,
    weight: Any,
    bias: Any,
    sigma: Activation,
) -> Tensor:
    """Low-rank kernel ``kappa_oi(x, y) = sum_r phi_oir(x) psi_oir(y)`` integrated by grid mean.

    :param v: features ``(J, d_v)`` or ``(B, J, d_v)``
    :param points: coordinates ``(J, d)`` fed to both factor networks
    :param phi: network returning ``(J, d_v * d_v * rank)`` output-side factors
    :param psi: network returning ``(J, d_v * d_v * rank)`` input-side factors
    """
    if rank < 1:
        raise ConfigurationError(f"Low-rank layer needs rank >= 1, got {rank}", key="rank")
    v = as_tensor(v)
    batched = v.ndim == 3
    if not batched:
        v = ops.reshape(v, (1, *v.shape))
    n, width = v.shape[1], v.shape[2]
    phi_x = ops.reshape(phi(points), (n, -1, width, rank))
    psi_y = ops.reshape(psi(points), (n, -1, width, rank))
    coefficients = ops.einsum("yoir,byi->boir", psi_y, v) / n
    kernel_term = ops.einsum("xoir,boir->bxo", phi_x, coefficients)
    out = sigma(_affine(v, weight, bias) + kernel_term)
    return out if batched else ops.reshape(out, out.shape[1:])


class LowRankLayer(Module):
    """Low-rank neural operator layer with separate factor networks."""

    def __init__(
        self,
        width: int,
        dims: int,
        rank: int,
        rng: Rng,
        hidden: Sequence[int] = (64, 128),
        activation: str = "relu",
    ) -> None:
        """Create ``phi`` and ``psi`` networks on coordinates and the local linear map."""
        if rank < 1:
            raise ConfigurationError(f"Low-rank layer needs rank >= 1, got {rank}", key="rank")
        self.rank = rank
        self.phi = FeedForward([dims, *hidden, width * width * rank], rng, activation)
        self.psi = FeedForward([dims, *hidden, width * width * rank], rng, activation)
        self.linear = Linear(width, width, rng)
        self.sigma = ops.activation(activation)

    def forward(self, v: Any, points: np.ndarray) -> Tensor:
        """Update features ``(B, J, width)`` on the point set."""
        return lno_layer(v, points, self.phi, self.psi, self.rank, self.linear, None, self.sigma)


# --- multipole V-cycle -----------------------------------------------------------------------


def mgno_vcycle(
    v: Any,
    graph: MultiLevelGraph,
    intra: Sequence[KernelFn],
    down: Sequence[KernelFn],
    up: Sequence[KernelFn],
    weights: Sequence[Any],
    biases: Sequence[Any],
    sigma: Activation,
    v_hat: Sequence[Tensor] | None = None,
) -> tuple[Tensor, list[Tensor]]:
    """One V-cycle over the levels of ``graph``.

    Downward: ``vc[l+1] = sigma(vh[l+1] + K_{l+1,l} vc[l])``. Upward:
    ``vh[l] = sigma((W_l + K_{l,l}) vc[l] + K_{l,l+1} vh[l+1] + b_l)`` with the
    coarse state taken from the current pass. ``v_hat`` holds the upward states
    of the previous cycle (zero before the first one).

    :return: the finest upward state and all upward states
    """
    levels = graph.num_levels
    if not (len(intra) == len(weights) == len(biases) == levels and len(down) == len(up) == levels - 1):
        raise ConfigurationError(f"V-cycle needs per-level parameters for {levels} levels", key="levels")
    v = as_tensor(v)
    if v.shape[0] != len(graph.levels[0]):
        raise ConfigurationError(
            f"Level-1 features cover {v.shape[0]} nodes, graph level has {len(graph.levels[0])}", key="levels"
        )
    width = v.shape[-1]
    if v_hat is None:
        v_hat = [Tensor(np.zeros((len(level), width))) for level in graph.levels]

    checks = [v]
    for l in range(levels - 1):
        transfer = kernel_integral(checks[l], graph.down[l], down[l](graph.down[l].edge_features))
        checks.append(sigma(v_hat[l + 1] + transfer))

    hats: list[Tensor] = [None] * levels  # type: ignore[list-item]
    for l in reversed(range(levels)):
        local = _affine(checks[l], weights[l], biases[l])
        local = local + kernel_integral(checks[l], graph.intra[l], intra[l](graph.intra[l].edge_features))
        if l < levels - 1:
            local = local + kernel_integral(hats[l + 1], graph.up[l], up[l](graph.up[l].edge_features))
        hats[l] = sigma(local)
    return hats[0], hats


class MultipoleLayer(Module):
    """One V-cycle with its own kernel networks per level and transition."""

    def __init__(
        self,
        width: int,
        edge_dim: int,
        levels: int,
        rng: Rng,
        kernel_hidden: Sequence[int] = (256, 256, 256),
        activation: str = "relu",
    ) -> None:
        """Create ``levels`` intra-level kernels and ``levels - 1`` kernels per transition direction."""
        if levels < 1:
            raise ConfigurationError(f"Multipole layer needs at least one level, got {levels}", key="levels")
        self.levels = levels
        self.intra = [KernelNet(edge_dim, width, width, rng, kernel_hidden, activation) for _ in range(levels)]
        self.down = [KernelNet(edge_dim, width, width, rng, kernel_hidden, activation) for _ in range(levels - 1)]
        self.up = [KernelNet(edge_dim, width, width, rng, kernel_hidden, activation) for _ in range(levels - 1)]
        self.linears = [Linear(width, width, rng) for _ in range(levels)]
        self.sigma = ops.activation(activation)

    def forward(
        self, v: Any, graph: MultiLevelGraph, v_hat: Sequence[Tensor] | None = None
    ) -> tuple[Tensor, list[Tensor]]:
        """Run the V-cycle; returns new finest features and upward states."""
        return mgno_vcycle(
            v, graph, self.intra, self.down, self.up, self.linears, [None] * self.levels, self.sigma, v_hat
        )


# --- Fourier ---------------------------------------------------------------------------------


def spectral_convolution(v: Any, r: ComplexTensor, ms: ModeSet, symmetric: bool = True) -> ComplexTensor:
    """``ifft(pad(R . truncate(fft(v))))`` over the grid axes of ``v`` shaped ``(B, *grid, d_in)``.

    ``R`` has shape ``(|ModeSet|, d_out, d_in)``. Returns the complex result so
    callers can inspect the imaginary residue.
    """
    v = as_tensor(v)
    axes = tuple(range(1, 1 + ms.dims))
    if v.ndim != ms.dims + 2:
        raise ConfigurationError(f"Spectral layer on {ms.dims}-D grid expects (B, *grid, C) input, got {v.shape}")
    if tuple(v.shape[1:-1]) != ms.sizes:
        raise ConfigurationError(f"Grid/ModeSet mismatch: input grid {v.shape[1:-1]}, mode set grid {ms.sizes}")
    batch, d_in = v.shape[0], v.shape[-1]
    if r.shape[0] != len(ms) or r.shape[2] != d_in:
        raise ConfigurationError(f"Mode weights {r.shape} do not fit {len(ms)} modes and {d_in} channels")
    if symmetric:
        r = enforce_conjugate_symmetry(r, ms, mode_axis=0)
    block = truncate_modes(fft(v, axes), ms, axes).reshape(batch, len(ms), d_in)
    mixed = complex_einsum("bmj,mlj->bml", block, r)
    mixed = mixed.reshape(batch, *ms.block_shape, r.shape[1])
    return ifft(pad_modes(mixed, ms, axes), axes)


def fno_layer(
    v: Any,
    r: ComplexTensor,
    ms: ModeSet,
    weight: Any,
    bias: Any,
    sigma: Activation,
    symmetric: bool = True,
) -> Tensor:
    """Fourier layer ``sigma(W v + ifft(pad(R . truncate(fft(v)))) + b)``; the imaginary part is dropped."""
    v = as_tensor(v)
    return sigma(_affine(v, weight, bias) + spectral_convolution(v, r, ms, symmetric).real)


def _mode_weights(rng: Rng, kmax: Sequence[int], out_channels: int, in_channels: int) -> Parameter:
    modes = int(np.prod([2 * k for k in kmax]))
    scale = 1.0 / in_channels
    return Parameter(uniform_init(rng, (2, modes, out_channels, in_channels), scale))


class SpectralLayer(Module):
    """Fourier neural operator layer with directly parameterised retained modes."""

    def __init__(self, width: int, kmax: Sequence[int], rng: Rng, activation: str = "relu") -> None:
        """Mode weights ``R`` uniform in ``(-1/width, 1/width)``; shape independent of the grid."""
        self.kmax = tuple(int(k) for k in kmax)
        self.weights = _mode_weights(rng, self.kmax, width, width)
        self.linear = Linear(width, width, rng)
        self.sigma = ops.activation(activation)

    def mode_set(self, sizes: Sequence[int]) -> ModeSet:
        """Mode set for a grid."""
        return ModeSet(tuple(sizes), self.kmax)

    def forward(self, v: Any) -> Tensor:
        """Apply to ``(B, *grid, width)``."""
        v = as_tensor(v)
        ms = self.mode_set(v.shape[1:-1])
        return fno_layer(v, ComplexTensor(self.weights), ms, self.linear, None, self.sigma)


def fno3d_layer(
    v: Any,
    r: ComplexTensor,
    kmax: Sequence[int],
    weight: Any,
    bias: Any,
    sigma: Activation,
    pad_t: int = 0,
) -> Tensor:
    """Space-time Fourier layer on ``(B, s_x, s_y, s_t, d_v)``.

    The time axis is zero-padded by ``pad_t`` points before the transform and
    cropped afterwards.
    """
    v = as_tensor(v)
    if v.ndim != 5:
        raise ConfigurationError(f"Space-time layer expects (B, sx, sy, st, C) input, got {v.shape}")
    steps = v.shape[3]
    padded = v
    if pad_t > 0:
        zeros = Tensor(np.zeros((v.shape[0], v.shape[1], v.shape[2], pad_t, v.shape[4])))
        padded = ops.concat([v, zeros], axis=3)
    ms = ModeSet(tuple(padded.shape[1:4]), tuple(kmax))
    kernel_term = spectral_convolution(padded, r, ms).real
    if pad_t > 0:
        kernel_term = kernel_term[:, :, :, :steps, :]
    return sigma(_affine(v, weight, bias) + kernel_term)


class SpectralLayer3d(Module):
    """Space-time Fourier layer."""

    def __init__(self, width: int, kmax: Sequence[int], rng: Rng, pad_t: int = 0, activation: str = "relu") -> None:
        """Mode weights over three axes plus the local linear map."""
        if len(kmax) != 3:
            raise ConfigurationError(f"Space-time layer needs three cutoffs, got {tuple(kmax)}", key="kmax")
        self.kmax = tuple(int(k) for k in kmax)
        self.pad_t = pad_t
        self.weights = _mode_weights(rng, self.kmax, width, width)
        self.linear = Linear(width, width, rng)
        self.sigma = ops.activation(activation)

    def forward(self, v: Any) -> Tensor:
        """Apply to ``(B, s_x, s_y, s_t, width)``."""
        return fno3d_layer(v, ComplexTensor(self.weights), self.kmax, self.linear, None, self.sigma, self.pad_t)


# --- attention -------------------------------------------------------------------------------


def attention_kernel_layer(
    v: Any,
    a: Any,
    b: Any,
    r_out: Any,
    r_val: Any,
    sigma: Activation,
) -> Tensor:
    """Single-head attention as a nonlinear kernel integral.

    ``u_j = sigma(v_j + R_out sum_q S_j(z_q) R_val v_q)`` with
    ``z_q = (<A v_1, B v_q>, ..., <A v_k, B v_q>) / sqrt(m)`` and ``S`` the
    softmax over the ``k`` entries of ``z_q``.

    :param v: features ``(k, d_v)`` or ``(batch, k, d_v)``
    :param a: query map ``(m, d_v)``
    :param b: key map ``(m, d_v)``
    :param r_out: output map ``(d_v, d_val)``
    :param r_val: value map ``(d_val, d_v)``
    """
    a, b, r_out, r_val = as_tensor(a), as_tensor(b), as_tensor(r_out), as_tensor(r_val)
    m = a.shape[0]
    if m < 1:
        raise ConfigurationError("Attention needs a key dimension m >= 1", key="key_dim")
    v = as_tensor(v)
    batched = v.ndim == 3
    if not batched:
        v = ops.reshape(v, (1, *v.shape))
    queries = ops.einsum("bjc,mc->bjm", v, a)
    keys = ops.einsum("bqc,mc->bqm", v, b)
    scores = ops.einsum("bjm,bqm->bjq", queries, keys) / math.sqrt(m)
    weights = ops.softmax(scores, axis=1)
    values = ops.einsum("bqc,wc->bqw", v, r_val)
    mixed = ops.einsum("bjq,bqw->bjw", weights, values)
    out = sigma(v + ops.einsum("bjw,cw->bjc", mixed, r_out))
    return out if batched else ops.reshape(out, out.shape[1:])


class AttentionLayer(Module):
    """Attention kernel layer with learned ``A``, ``B``, ``R_out`` and ``R_val``."""

    def __init__(
        self, width: int, rng: Rng, key_dim: int = 16, value_dim: int | None = None, activation: str = "relu"
    ) -> None:
        """Initialise all maps uniformly with bound ``1/sqrt(fan_in)``."""
        if key_dim < 1:
            raise ConfigurationError(f"Attention needs key_dim >= 1, got {key_dim}", key="key_dim")
        value_dim = value_dim or width
        bound = 1.0 / math.sqrt(width)
        self.query = Parameter(uniform_init(rng, (key_dim, width), bound))
        self.key = Parameter(uniform_init(rng, (key_dim, width), bound))
        self.value = Parameter(uniform_init(rng, (value_dim, width), bound))
        self.output = Parameter(uniform_init(rng, (width, value_dim), 1.0 / math.sqrt(value_dim)))
        self.sigma = ops.activation(activation)

    def forward(self, v: Any) -> Tensor:
        """Apply to ``(B, k, width)``."""
        return attention_kernel_layer(v, self.query, self.key, self.output, self.value, self.sigma)


# --- DeepONet --------------------------------------------------------------------------------


def deeponet_forward(
    sensors: Any, points: Any, branch: KernelFn, trunk: KernelFn, sensor_count: int | None = None
) -> Tensor:
    """``G(a)(x) = sum_k G_k(a~) phi_k(x)``.

    :param sensors: sensor values ``(B, q)``
    :param points: query points ``(n, d')``
    :return: values ``(B, n)``
    """
    sensors = as_tensor(sensors)
    if sensor_count is not None and sensors.shape[-1] != sensor_count:
        raise ContractError(
            f"fixed-sensor architecture: model was trained with {sensor_count} sensors, got {sensors.shape[-1]}"
        )
    coefficients = branch(sensors)
    basis = trunk(points)
    return ops.einsum("bp,np->bn", coefficients, basis)
