#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Pipeline step generating a dataset with the problem's numerical solver."""

from __future__ import annotations

import logging

from oarepo_neural_operator.artifacts import PipelineData
from oarepo_neural_operator.pde.dataset import PROBLEM_MEASURES, build_dataset
from oarepo_neural_operator.pipeline_steps.base import PipelineStep, StepIO
from oarepo_neural_operator.random_fields import MeasureSpec, Rng

logger = logging.getLogger(__name__)


class GenerateDataStep(PipelineStep):
    """Draw ``n_train + n_test`` inputs, solve, optionally downsample and save."""

    name = "gen_data"

    def process(self, inputs: StepIO, args: dict) -> StepIO:
        """Write ``<output>/gen_data/dataset``.

        :param inputs: Artifacts of earlier steps (passed through).
        :param args: Resolved run configuration; reads the ``data`` section and ``seed``.
        :return: StepIO with the dataset artifact appended.
        """
        data = args["data"]
        problem = data["problem"]
        measure = MeasureSpec.for_kind(PROBLEM_MEASURES[problem], **data["measure"])
        grid = measure.grid(data["resolution"])
        dataset = build_dataset(
            problem,
            data["n_train"] + data["n_test"],
            grid,
            Rng(args["seed"]),
            solver_params=data["solver"],
            measure=measure,
            workers=data["workers"],
        )
        if data["downsample"] > 1:
            dataset = dataset.downsample(data["downsample"])
        dataset.manifest["resolved_config"] = args
        path = dataset.save(self.step_dir(args) / "dataset")
        logger.info("Dataset of %d samples at resolution %d saved to %s", len(dataset), dataset.resolution, path)
        return StepIO(
            [
                *inputs,
                PipelineData(path, {"kind": "dataset", "problem": problem, "resolution": dataset.resolution}),
            ]
        )
