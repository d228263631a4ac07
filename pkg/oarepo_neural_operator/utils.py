#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Helpers for oarepo-neural-operator."""

from __future__ import annotations

import importlib
from typing import TYPE_CHECKING, Any, cast

from oarepo_neural_operator.config import (
    FORWARD_MAP_DEFINITIONS,
    MODEL_DEFINITIONS,
    STEP_DEFINITIONS,
)
from oarepo_neural_operator.errors import ConfigurationError

if TYPE_CHECKING:
    from oarepo_neural_operator.bayes.forward_maps import ForwardMap
    from oarepo_neural_operator.nop.models import OperatorModel
    from oarepo_neural_operator.pipeline_steps.base import PipelineStep


def _load(definitions: dict[str, str], name: str, what: str, key: str) -> Any:
    dotted = definitions.get(name, None)
    if dotted is None:
        raise ConfigurationError(f"{what} {name} is not defined", key=key)

    module_name, class_name = dotted.rsplit(".", 1)
    module = importlib.import_module(module_name)
    return getattr(module, class_name)


def get_pipeline_step_obj(name: str) -> type[PipelineStep]:
    """Get pipeline step object by name."""
    return cast("type[PipelineStep]", _load(STEP_DEFINITIONS, name, "PIPELINE_STEP", "pipeline_steps"))


def get_model_class(variant: str) -> type[OperatorModel]:
    """Get operator model class by variant tag."""
    return cast("type[OperatorModel]", _load(MODEL_DEFINITIONS, variant, "Model variant", "model.variant"))


def get_forward_map_class(name: str) -> type[ForwardMap]:
    """Get forward map class by name."""
    return cast("type[ForwardMap]", _load(FORWARD_MAP_DEFINITIONS, name, "Forward map", "invert.forward_map"))
