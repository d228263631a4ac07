#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Pipeline step running the pCN inversion with the solver and/or a surrogate."""

from __future__ import annotations

import logging

import numpy as np

from oarepo_neural_operator.artifacts import PipelineData, write_block, write_manifest
from oarepo_neural_operator.bayes import (
    InverseProblemSpec,
    SolverForwardMap,
    SurrogateForwardMap,
    invert_compare,
    pcn_chain,
    synthetic_observations,
)
from oarepo_neural_operator.pipeline_steps.base import PipelineStep, StepIO, load_model
from oarepo_neural_operator.random_fields import MeasureSpec, Rng, sample_grf

logger = logging.getLogger(__name__)

TRUTH_STREAM = 1000
NOISE_STREAM = 1001
CHAIN_STREAM = 0


class InvertStep(PipelineStep):
    """Recover the initial vorticity from noisy point observations of the final state."""

    name = "invert"

    def _spec(self, options: dict, forward_map: SolverForwardMap | SurrogateForwardMap) -> InverseProblemSpec:
        return InverseProblemSpec(
            forward_map=forward_map,
            prior=MeasureSpec.for_kind("ns_vorticity_ic"),
            resolution=options["resolution"],
            gamma=options["gamma"],
            beta=options["beta"],
            burn_in=options["burn_in"],
            samples=options["samples"],
            thin=options["thin"],
            observation_points=options["observation_points"],
            literal_covariance=options["literal_covariance"],
        )

    def process(self, inputs: StepIO, args: dict) -> StepIO:
        """Write chains, observations and (for ``forward_map=both``) the timing report.

        :param inputs: Artifacts of earlier steps; a checkpoint is needed for the surrogate.
        :param args: Resolved run configuration; reads the ``invert`` section and ``seed``.
        :return: StepIO with the chain artifact appended.
        """
        options = args["invert"]
        solver = SolverForwardMap(options["t_end"], options["viscosity"], options["dt"], options["forcing"])
        solver_spec = self._spec(options, solver)
        w_true = sample_grf(solver_spec.prior, solver_spec.grid(), Rng(args["seed"], TRUTH_STREAM))
        y = synthetic_observations(w_true, solver_spec, Rng(args["seed"], NOISE_STREAM))

        directory = self.step_dir(args)
        write_block(directory / "observations.bin", y)
        write_block(directory / "true_initial.bin", w_true.values)
        write_manifest(
            directory,
            "inversion",
            {
                "spec": solver_spec.to_dict(),
                "observations_shape": list(y.shape),
                "true_initial_shape": list(w_true.values.shape),
                "resolved_config": args,
            },
        )

        choice = options["forward_map"]
        if choice == "solver":
            pcn_chain(solver_spec, y, Rng(args["seed"], CHAIN_STREAM), progress=options["progress"]).save(
                directory / "solver"
            )
        else:
            surrogate = SurrogateForwardMap(load_model(inputs, options["checkpoint"], "invert.checkpoint").model)
            surrogate_spec = self._spec(options, surrogate)
            if choice == "surrogate":
                pcn_chain(surrogate_spec, y, Rng(args["seed"], CHAIN_STREAM), progress=options["progress"]).save(
                    directory / "surrogate"
                )
            else:
                comparison = invert_compare(
                    solver_spec, surrogate_spec, y, args["seed"], CHAIN_STREAM, progress=options["progress"]
                )
                comparison.save(directory)
                logger.info(
                    "Posterior means differ by %.4f (relative L2); truth misfit %.4f",
                    comparison.mean_difference,
                    float(
                        np.linalg.norm(comparison.solver.mean.values - w_true.values)
                        / np.linalg.norm(w_true.values)
                    ),
                )
        return StepIO([*inputs, PipelineData(directory, {"kind": "chain", "forward_map": choice})])
