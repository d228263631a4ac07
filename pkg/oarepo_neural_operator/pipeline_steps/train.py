#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Pipeline step training an operator model."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Any

from oarepo_neural_operator.artifacts import PipelineData
from oarepo_neural_operator.nop.models import build_model
from oarepo_neural_operator.pipeline_steps.base import PipelineStep, StepIO, load_dataset, split_dataset
from oarepo_neural_operator.train import TrainConfig, train

if TYPE_CHECKING:
    from oarepo_neural_operator.pde.dataset import Dataset

logger = logging.getLogger(__name__)


def complete_model_config(model: dict[str, Any], dataset: Dataset, seed: int) -> dict[str, Any]:
    """Fill geometry-dependent hyperparameters the configuration leaves out."""
    config = dict(model)
    in_channels = dataset.inputs[0].channels
    out_channels = dataset.outputs[0].channels
    time_dependent = config["variant"] == "fno3d" or config.get("autoregressive", False)
    config.setdefault("dims", dataset.input_grid.dims)
    config.setdefault("in_channels", in_channels)
    config.setdefault("out_channels", 1 if time_dependent else out_channels)
    config.setdefault("seed", seed)
    if config["variant"] == "fno3d":
        config.setdefault("time_steps", out_channels)
    if config["variant"] == "deeponet":
        config.setdefault("sensors", dataset.input_grid.num_points * in_channels)
    return config


class TrainStep(PipelineStep):
    """Train the configured model on the first ``n_train`` samples."""

    name = "train"

    def process(self, inputs: StepIO, args: dict) -> StepIO:
        """Write ``<output>/train/checkpoint`` and ``<output>/train/history.csv``.

        :param inputs: Artifacts of earlier steps; a dataset artifact is used when ``data.dataset`` is unset.
        :param args: Resolved run configuration.
        :return: StepIO with the checkpoint artifact appended.
        """
        dataset = load_dataset(inputs, args)
        train_set, test_set = split_dataset(dataset, args)
        model = build_model(complete_model_config(args["model"], train_set, args["seed"]))
        cfg = TrainConfig.from_dict(args["train"])
        logger.info("Training %s on %d samples (test %d)", model.variant, len(train_set), len(test_set))
        result = train(
            model,
            train_set,
            cfg,
            test_dataset=test_set if len(test_set) else None,
            output_dir=self.step_dir(args),
            metadata={"resolution": train_set.resolution, "resolved_config": args},
        )
        return StepIO(
            [
                *inputs,
                PipelineData(
                    result.checkpoint,
                    {"kind": "checkpoint", "variant": model.variant, "resolution": train_set.resolution},
                ),
            ]
        )
