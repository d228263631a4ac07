#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Run configuration service: defaults, JSON file, ``--set`` overrides and validation."""

from __future__ import annotations

import copy
import inspect
import json
import logging
from pathlib import Path
from typing import TYPE_CHECKING, Any

from oarepo_neural_operator.config import OUTPUT_ROOT, RESOLVED_CONFIG_NAME, STEP_DEFINITIONS
from oarepo_neural_operator.errors import ConfigurationError
from oarepo_neural_operator.pde.dataset import PROBLEM_MEASURES, PROBLEMS, resolve_solver_params
from oarepo_neural_operator.random_fields import MeasureSpec
from oarepo_neural_operator.train import TrainConfig
from oarepo_neural_operator.utils import get_model_class

if TYPE_CHECKING:
    from collections.abc import Sequence

logger = logging.getLogger(__name__)

# sections whose values are free-form dictionaries validated by their consumer
OPEN_KEYS = {("data", "measure"), ("data", "solver")}

DEFAULT_CONFIG: dict[str, Any] = {
    "seed": 0,
    "output_dir": None,
    "pipeline_steps": [],
    "data": {
        "problem": "burgers",
        "resolution": 256,
        "n_train": 1000,
        "n_test": 200,
        "downsample": 1,
        "measure": {},
        "solver": {},
        "workers": 1,
        "dataset": None,
    },
    "model": {"variant": "fno"},
    "train": TrainConfig().to_dict(),
    "eval": {
        "checkpoint": None,
        "batch_size": 20,
        "resolutions": [],
        "superres_dataset": None,
        "superres_downsample": 1,
        "noise_level": 0.0,
        "retrain_with_noise": False,
        "band": None,
        "samples": 1,
    },
    "invert": {
        "forward_map": "both",
        "checkpoint": None,
        "resolution": 64,
        "gamma": 0.1,
        "beta": 0.1,
        "burn_in": 5000,
        "samples": 25000,
        "thin": 100,
        "observation_points": 7,
        "literal_covariance": False,
        "t_end": 10.0,
        "viscosity": 1e-3,
        "dt": 1e-4,
        "forcing": True,
        "progress": False,
    },
}

SECTIONS = ("data", "model", "train", "eval", "invert")


def parse_value(text: str) -> Any:
    """JSON literal if it parses, otherwise the raw string."""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


class RunConfigService:
    """Holds the resolved run configuration.

    Values come from :data:`DEFAULT_CONFIG`, then the JSON file, then
    ``section.key=value`` overrides. Unknown sections or keys are rejected.
    """

    def __init__(self, config_path: str | Path | None = None, overrides: Sequence[str] = ()) -> None:
        """Load, override and validate.

        :param config_path: Optional JSON run configuration.
        :param overrides: ``section.key=value`` strings; values are parsed as JSON literals.
        :raises FileNotFoundError: if ``config_path`` does not exist
        :raises ConfigurationError: on unknown keys or invalid values
        """
        self.config_path = Path(config_path) if config_path else None
        self.config: dict[str, Any] = copy.deepcopy(DEFAULT_CONFIG)
        if self.config_path is not None:
            self.load_config()
        for override in overrides:
            self.apply_override(override)
        self.validate()

    def load_config(self) -> None:
        """Merge the JSON file into the defaults."""
        if not self.config_path.exists():
            raise FileNotFoundError(f"Run configuration {self.config_path} does not exist.")
        try:
            with self.config_path.open("rb") as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"Failed to parse run configuration {self.config_path}: {e}") from e
        if not isinstance(data, dict):
            raise ConfigurationError(f"Run configuration {self.config_path} must be a JSON object")
        for key, value in data.items():
            if key in SECTIONS:
                if not isinstance(value, dict):
                    raise ConfigurationError(f"Section {key} must be an object", key=key)
                for inner, inner_value in value.items():
                    self.set(f"{key}.{inner}", inner_value)
            else:
                self.set(key, value)

    def set(self, dotted: str, value: Any) -> None:
        """Assign one value addressed as ``section.key`` (or a top-level key)."""
        parts = dotted.split(".")
        if parts[0] not in self.config:
            raise ConfigurationError(f"Unknown configuration key '{dotted}'", key=dotted)
        if len(parts) == 1:
            if parts[0] in SECTIONS:
                raise ConfigurationError(f"Section '{dotted}' cannot be assigned a value", key=dotted)
            self.config[parts[0]] = value
            return
        section = self.config[parts[0]]
        if not isinstance(section, dict):
            raise ConfigurationError(f"Unknown configuration key '{dotted}'", key=dotted)
        key = parts[1]
        # model hyperparameters are checked against the variant in validate()
        if parts[0] != "model" and key not in section:
            raise ConfigurationError(f"Unknown configuration key '{dotted}'", key=dotted)
        if len(parts) == 2:
            section[key] = value
        elif len(parts) == 3 and (parts[0], key) in OPEN_KEYS:
            section[key] = {**section[key], parts[2]: value}
        else:
            raise ConfigurationError(f"Unknown configuration key '{dotted}'", key=dotted)

    def apply_override(self, text: str) -> None:
        """Apply one ``section.key=value`` override."""
        if "=" not in text:
            raise ConfigurationError(f"Override '{text}' is not of the form section.key=value", key=text)
        dotted, value = text.split("=", 1)
        self.set(dotted.strip(), parse_value(value.strip()))

    def validate(self) -> None:
        """Check values against the consumers of every section."""
        data = self.config["data"]
        if data["problem"] not in PROBLEMS:
            raise ConfigurationError(
                f"Unknown problem '{data['problem']}', expected one of {PROBLEMS}", key="data.problem"
            )
        resolve_solver_params(data["problem"], data["solver"])
        try:
            MeasureSpec.for_kind(PROBLEM_MEASURES[data["problem"]], **data["measure"])
        except TypeError as e:
            raise ConfigurationError(f"Invalid measure option: {e}", key="data.measure") from e
        for key in ("resolution", "n_train", "downsample", "workers"):
            if not isinstance(data[key], int) or data[key] < (0 if key == "n_train" else 1):
                raise ConfigurationError(f"data.{key} must be a positive integer, got {data[key]!r}", key=f"data.{key}")

        model = dict(self.config["model"])
        model_class = get_model_class(model.pop("variant", None) or "")
        accepted = set(inspect.signature(model_class.__init__).parameters) - {"self"}
        for key in model:
            if key not in accepted:
                raise ConfigurationError(
                    f"Unknown hyperparameter '{key}' for {self.config['model']['variant']}", key=f"model.{key}"
                )

        TrainConfig.from_dict(self.config["train"])

        if self.config["invert"]["forward_map"] not in ("solver", "surrogate", "both"):
            raise ConfigurationError("invert.forward_map must be solver, surrogate or both", key="invert.forward_map")
        for step in self.config["pipeline_steps"]:
            if step not in STEP_DEFINITIONS:
                raise ConfigurationError(f"PIPELINE_STEP {step} is not defined", key="pipeline_steps")

    def section(self, name: str) -> dict[str, Any]:
        """One configuration section."""
        return self.config[name]

    @property
    def seed(self) -> int:
        """Global run seed."""
        return int(self.config["seed"])

    def output_dir(self, command: str) -> Path:
        """Configured output directory, or ``<output root>/<command>``."""
        return Path(self.config["output_dir"] or Path(OUTPUT_ROOT) / command)

    def save_resolved(self, directory: str | Path) -> Path:
        """Write ``resolved_config.json`` into ``directory``."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / RESOLVED_CONFIG_NAME
        path.write_text(json.dumps(self.config, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return path
