#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Configuration for oarepo-neural-operator."""

from __future__ import annotations

import os

STEP_DEFINITIONS = {
    "gen_data": "oarepo_neural_operator.pipeline_steps.gen_data.GenerateDataStep",
    "train": "oarepo_neural_operator.pipeline_steps.train.TrainStep",
    "eval": "oarepo_neural_operator.pipeline_steps.evaluate.EvaluateStep",
    "superres": "oarepo_neural_operator.pipeline_steps.evaluate.SuperResolutionStep",
    "invert": "oarepo_neural_operator.pipeline_steps.invert.InvertStep",
    "spectra": "oarepo_neural_operator.pipeline_steps.spectra.SpectraStep",
}

MODEL_DEFINITIONS = {
    "fno": "oarepo_neural_operator.nop.models.FourierNeuralOperator",
    "fno3d": "oarepo_neural_operator.nop.models.FourierNeuralOperator3d",
    "gno": "oarepo_neural_operator.nop.models.GraphNeuralOperator",
    "lno": "oarepo_neural_operator.nop.models.LowRankNeuralOperator",
    "mgno": "oarepo_neural_operator.nop.models.MultipoleGraphNeuralOperator",
    "attention": "oarepo_neural_operator.nop.models.AttentionNeuralOperator",
    "deeponet": "oarepo_neural_operator.nop.models.DeepONet",
    "green_kernel": "oarepo_neural_operator.nop.models.GreenKernelOperator",
}

FORWARD_MAP_DEFINITIONS = {
    "solver": "oarepo_neural_operator.bayes.forward_maps.SolverForwardMap",
    "surrogate": "oarepo_neural_operator.bayes.forward_maps.SurrogateForwardMap",
}

"""Artifact layout"""
RESOLVED_CONFIG_NAME = "resolved_config.json"
HISTORY_NAME = "history.csv"

# Default root for run outputs; NEURAL_OPERATOR_OUTPUT_ROOT overrides it
OUTPUT_ROOT = os.environ.get("NEURAL_OPERATOR_OUTPUT_ROOT", "runs")
