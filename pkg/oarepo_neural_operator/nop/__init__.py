#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Neural operator layers, graphs and models."""

from __future__ import annotations

from oarepo_neural_operator.nop.graph import (
    Graph,
    MultiLevelGraph,
    build_ball_graph,
    build_bipartite_graph,
    build_multilevel_graph,
    build_orthogonal_multilevel_graph,
    edge_features,
    partition_nodes,
    radius_edges,
)
from oarepo_neural_operator.nop.layers import (
    AttentionLayer,
    GraphKernelLayer,
    LowRankLayer,
    MultipoleLayer,
    SpectralLayer,
    SpectralLayer3d,
    attention_kernel_layer,
    deeponet_forward,
    fno3d_layer,
    fno_layer,
    gno_layer,
    kernel_integral,
    lno_layer,
    mgno_vcycle,
    spectral_convolution,
)
from oarepo_neural_operator.nop.models import (
    AttentionNeuralOperator,
    DeepONet,
    FourierNeuralOperator,
    FourierNeuralOperator3d,
    GraphNeuralOperator,
    GreenKernelOperator,
    LiftedOperatorModel,
    LowRankNeuralOperator,
    MultipoleGraphNeuralOperator,
    OperatorModel,
    build_model,
    grid_features,
    model_forward,
)
from oarepo_neural_operator.nop.module import FeedForward, KernelNet, Linear, Module, Parameter, uniform_init

__all__ = [
    "AttentionLayer",
    "AttentionNeuralOperator",
    "DeepONet",
    "FeedForward",
    "FourierNeuralOperator",
    "FourierNeuralOperator3d",
    "Graph",
    "GraphKernelLayer",
    "GraphNeuralOperator",
    "GreenKernelOperator",
    "KernelNet",
    "LiftedOperatorModel",
    "Linear",
    "LowRankLayer",
    "LowRankNeuralOperator",
    "Module",
    "MultiLevelGraph",
    "MultipoleGraphNeuralOperator",
    "MultipoleLayer",
    "OperatorModel",
    "Parameter",
    "SpectralLayer",
    "SpectralLayer3d",
    "attention_kernel_layer",
    "build_ball_graph",
    "build_bipartite_graph",
    "build_model",
    "build_multilevel_graph",
    "build_orthogonal_multilevel_graph",
    "deeponet_forward",
    "edge_features",
    "fno3d_layer",
    "fno_layer",
    "gno_layer",
    "grid_features",
    "kernel_integral",
    "lno_layer",
    "mgno_vcycle",
    "model_forward",
    "partition_nodes",
    "radius_edges",
    "spectral_convolution",
    "uniform_init",
]
