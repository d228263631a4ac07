#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Pipeline steps estimating test errors and zero-shot super-resolution errors."""

from __future__ import annotations

import logging

from oarepo_neural_operator.artifacts import PipelineData
from oarepo_neural_operator.evaluation import (
    ErrorReport,
    config_fingerprint,
    evaluate,
    resolution_sweep,
    robustness_study,
    superresolution,
)
from oarepo_neural_operator.pipeline_steps.base import (
    PipelineStep,
    StepIO,
    held_out_dataset,
    load_dataset,
    load_model,
    split_dataset,
)
from oarepo_neural_operator.random_fields import Rng
from oarepo_neural_operator.train import TrainConfig

logger = logging.getLogger(__name__)


class EvaluateStep(PipelineStep):
    """Test error, optional resolution sweep and optional robustness study."""

    name = "eval"

    def process(self, inputs: StepIO, args: dict) -> StepIO:
        """Write ``report.csv`` and ``report.txt`` to ``<output>/eval``.

        :param inputs: Artifacts of earlier steps (dataset, checkpoint).
        :param args: Resolved run configuration; reads ``data`` and ``eval``.
        :return: StepIO with the report artifact appended.
        """
        options = args["eval"]
        checkpoint = load_model(inputs, options["checkpoint"], "eval.checkpoint")
        model = checkpoint.model
        dataset = load_dataset(inputs, args)
        test = held_out_dataset(dataset, args)

        report = ErrorReport(fingerprint=config_fingerprint(args))
        report.add(evaluate(model, test, options["batch_size"], label="test"))
        factors = [f for f in options["resolutions"] if f > 1]
        if factors:
            sweep = resolution_sweep(model, [test.downsample(f) for f in factors], options["batch_size"])
            for entry in sweep.entries:
                report.add(entry)
        if options["noise_level"] > 0:
            train_set, _ = split_dataset(dataset, args)
            result = robustness_study(
                model,
                test,
                Rng(args["seed"], 1),
                options["noise_level"],
                train_dataset=train_set if options["retrain_with_noise"] else None,
                train_config=TrainConfig.from_dict(args["train"]),
            )
            for entry in result.to_report(test.resolution, len(test)).entries:
                report.add(entry)

        path = report.save(self.step_dir(args))
        summary = ", ".join(f"{e.label}@{e.resolution}: {e.error:.4f}" for e in report.entries)
        logger.info("Evaluation finished: %s", summary)
        return StepIO([*inputs, PipelineData(path, {"kind": "report", "fingerprint": report.fingerprint})])


class SuperResolutionStep(PipelineStep):
    """Zero-shot evaluation on a finer grid than the training one."""

    name = "superres"

    def process(self, inputs: StepIO, args: dict) -> StepIO:
        """Write the super-resolution report to ``<output>/superres``.

        :param inputs: Artifacts of earlier steps (dataset, checkpoint).
        :param args: Resolved run configuration; ``eval.superres_dataset`` names the fine dataset.
        :return: StepIO with the report artifact appended.
        """
        options = args["eval"]
        checkpoint = load_model(inputs, options["checkpoint"], "eval.checkpoint")
        dataset = load_dataset(inputs, args, options["superres_dataset"], options["superres_downsample"])
        test = held_out_dataset(dataset, args)
        entry = superresolution(
            checkpoint.model, test, checkpoint.manifest.get("resolution"), options["batch_size"]
        )
        report = ErrorReport([entry], fingerprint=config_fingerprint(args))
        path = report.save(self.step_dir(args))
        return StepIO([*inputs, PipelineData(path, {"kind": "report", "fingerprint": report.fingerprint})])
