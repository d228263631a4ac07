#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Bayesian inversion of the initial vorticity with pCN MCMC."""

from __future__ import annotations

from oarepo_neural_operator.bayes.forward_maps import (
    ForwardMap,
    FunctionForwardMap,
    SolverForwardMap,
    SurrogateForwardMap,
    get_forward_map,
)
from oarepo_neural_operator.bayes.inverse import (
    InverseProblemSpec,
    interpolate_periodic,
    log_likelihood,
    observation_points,
    observe,
    synthetic_observations,
)
from oarepo_neural_operator.bayes.pcn import ChainResult, InversionComparison, invert_compare, pcn_chain, suggest_beta

__all__ = [
    "ChainResult",
    "ForwardMap",
    "FunctionForwardMap",
    "InverseProblemSpec",
    "InversionComparison",
    "SolverForwardMap",
    "SurrogateForwardMap",
    "get_forward_map",
    "interpolate_periodic",
    "invert_compare",
    "log_likelihood",
    "observation_points",
    "observe",
    "pcn_chain",
    "suggest_beta",
    "synthetic_observations",
]
