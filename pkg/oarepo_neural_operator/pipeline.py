#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Execution of pipeline steps in order, handing artifacts from one step to the next."""

from __future__ import annotations

import copy
import logging
from typing import TYPE_CHECKING

from oarepo_neural_operator.errors import ConfigurationError
from oarepo_neural_operator.pipeline_steps.base import StepIO
from oarepo_neural_operator.utils import get_pipeline_step_obj

if TYPE_CHECKING:
    from collections.abc import Sequence

    from oarepo_neural_operator.run_config import RunConfigService

logger = logging.getLogger(__name__)


def run_pipeline(service: RunConfigService, steps: Sequence[str] | None = None, command: str = "pipeline") -> StepIO:
    """Run ``steps`` (default: the configured ``pipeline_steps``) and return all artifacts.

    Every step receives the resolved configuration with ``output_dir`` set; the
    resolved configuration is also written next to the outputs.

    :raises ConfigurationError: if no steps are given or a step is unknown
    """
    steps = list(steps) if steps else list(service.config["pipeline_steps"])
    if not steps:
        raise ConfigurationError("No pipeline steps found in configuration", key="pipeline_steps")

    output_dir = service.output_dir(command)
    service.save_resolved(output_dir)
    args = copy.deepcopy(service.config)
    args["output_dir"] = str(output_dir)

    current = StepIO()
    for step_type in steps:
        pipeline_step_obj = get_pipeline_step_obj(step_type)()  # initialize step
        logger.info("Running step %s", step_type)
        current = pipeline_step_obj.process(current, args)
        service.save_resolved(pipeline_step_obj.step_dir(args))
    return current
