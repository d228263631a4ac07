#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Losses, optimizer, training loop and checkpoints."""

from __future__ import annotations

from oarepo_neural_operator.train.checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from oarepo_neural_operator.train.losses import (
    LOSSES,
    dataset_errors,
    get_loss,
    mse_loss,
    relative_l2,
    relative_l2_loss,
    relative_l2_values,
)
from oarepo_neural_operator.train.loop import History, HistoryRow, TrainConfig, TrainResult, train
from oarepo_neural_operator.train.normalizer import NormalizedModel, UnitGaussianNormalizer
from oarepo_neural_operator.train.optim import AdamState, adam_step, learning_rate

__all__ = [
    "LOSSES",
    "AdamState",
    "Checkpoint",
    "History",
    "HistoryRow",
    "NormalizedModel",
    "TrainConfig",
    "TrainResult",
    "UnitGaussianNormalizer",
    "adam_step",
    "dataset_errors",
    "get_loss",
    "learning_rate",
    "load_checkpoint",
    "mse_loss",
    "relative_l2",
    "relative_l2_loss",
    "relative_l2_values",
    "train",
]
