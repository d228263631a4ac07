#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Pipeline step exporting vorticity spectra per snapshot."""

from __future__ import annotations

import csv
import logging

from oarepo_neural_operator.artifacts import PipelineData
from oarepo_neural_operator.errors import ConfigurationError
from oarepo_neural_operator.evaluation import compare_trajectory_spectra, default_band
from oarepo_neural_operator.pipeline_steps.base import PipelineStep, StepIO, held_out_dataset, load_dataset, load_model
from oarepo_neural_operator.spectral import spectrum

logger = logging.getLogger(__name__)


class SpectraStep(PipelineStep):
    """Two-column spectrum files for every output snapshot of the first test samples.

    With a checkpoint the model's predictions are exported next to the truth and
    the fitted slopes of both go to ``slopes.csv``.
    """

    name = "spectra"

    def process(self, inputs: StepIO, args: dict) -> StepIO:
        """Write ``sample<i>_t<j>_true.txt`` (and ``_pred.txt``) into ``<output>/spectra``.

        :param inputs: Artifacts of earlier steps (dataset, optionally checkpoint).
        :param args: Resolved run configuration; reads ``eval.samples``, ``eval.band`` and ``eval.checkpoint``.
        :return: StepIO with the spectra directory appended.
        """
        options = args["eval"]
        test = held_out_dataset(load_dataset(inputs, args), args)
        grid = test.output_grid
        if grid.dims != 2:
            raise ConfigurationError(f"Spectra need 2-D outputs, dataset has {grid.dims}-D", key="data.problem")
        directory = self.step_dir(args)
        band = tuple(options["band"]) if options["band"] else default_band(grid.sizes[0])
        configured = options["checkpoint"] or inputs.find("checkpoint")
        model = load_model(inputs, options["checkpoint"], "eval.checkpoint").model if configured else None

        rows = []
        for i in range(min(options["samples"], len(test))):
            truth = test.outputs[i]
            if model is None:
                for t in range(truth.channels):
                    spectrum(truth.values[..., t], label="truth").save(directory / f"sample{i}_t{t}_true.txt")
                continue
            predicted = model.predict(test.inputs[i], steps=truth.channels)
            for t, comparison in enumerate(compare_trajectory_spectra(predicted, truth, band)):
                comparison.save(directory, f"sample{i}_t{t}")
                rows.append([i, t, comparison.predicted_slope, comparison.truth_slope])

        if rows:
            with (directory / "slopes.csv").open("w", newline="", encoding="utf-8") as f:
                writer = csv.writer(f)
                writer.writerow(["sample", "snapshot", "predicted_slope", "truth_slope", "band"])
                writer.writerows([*row, f"{band[0]}-{band[1]}"] for row in rows)
        directory.mkdir(parents=True, exist_ok=True)
        logger.info("Spectra written to %s", directory)
        return StepIO([*inputs, PipelineData(directory, {"kind": "spectrum", "band": list(band)})])
