#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Pipeline step interface and artifact lookup shared by all steps."""

from __future__ import annotations

import abc
from pathlib import Path
from typing import TYPE_CHECKING, Any

from oarepo_neural_operator.artifacts import PipelineData
from oarepo_neural_operator.errors import ConfigurationError
from oarepo_neural_operator.pde.dataset import Dataset
from oarepo_neural_operator.train import load_checkpoint

if TYPE_CHECKING:
    from oarepo_neural_operator.train import Checkpoint


class StepIO(list[PipelineData]):
    """Class representing the artifacts available after a pipeline step."""

    def find(self, kind: str) -> PipelineData | None:
        """Most recent artifact of ``kind``."""
        for artifact in reversed(self):
            if artifact.kind == kind:
                return artifact
        return None


class PipelineStep(abc.ABC):
    """Abstract base class for a step in a processing pipeline."""

    name: str = ""

    @abc.abstractmethod
    def process(self, inputs: StepIO, args: dict) -> StepIO:
        """Run the step and return the artifacts available afterwards.

        :param inputs: Artifacts produced by earlier steps; a step looks up the
                       dataset or checkpoint it needs by kind when the run
                       configuration does not name a path.
        :param args: The resolved run configuration; ``args["output_dir"]`` is
                     the directory this run writes to.
        :return: ``inputs`` followed by the artifacts written by this step.
        """

    def step_dir(self, args: dict) -> Path:
        """Directory for this step's artifacts."""
        return Path(args["output_dir"]) / self.name


def artifact_path(inputs: StepIO, configured: Any, kind: str, key: str) -> Path:
    """Configured path, or the latest artifact of ``kind`` from earlier steps."""
    if configured:
        return Path(configured)
    artifact = inputs.find(kind)
    if artifact is None:
        raise ConfigurationError(f"No {kind} given and no earlier step produced one", key=key)
    return artifact.path


def load_dataset(inputs: StepIO, args: dict, path: Any = None, factor: int | None = None) -> Dataset:
    """Dataset named in the configuration (or produced earlier), strided by ``data.downsample``."""
    data = args["data"]
    dataset = Dataset.load(artifact_path(inputs, path or data["dataset"], "dataset", "data.dataset"))
    factor = data["downsample"] if factor is None else factor
    if factor > 1 and dataset.manifest.get("downsample_factor", 1) == 1:
        dataset = dataset.downsample(factor)
    return dataset


def split_dataset(dataset: Dataset, args: dict) -> tuple[Dataset, Dataset]:
    """First ``n_train`` samples for training, at most ``n_test`` of the rest for testing."""
    n_train = min(args["data"]["n_train"], len(dataset))
    train, rest = dataset.split(n_train)
    return train, rest.subset(range(min(args["data"]["n_test"], len(rest))))


def held_out_dataset(dataset: Dataset, args: dict) -> Dataset:
    """Held-out part of ``dataset``; the whole dataset when it holds no training part."""
    _, test = split_dataset(dataset, args)
    return test if len(test) else dataset


def load_model(inputs: StepIO, configured: Any, key: str) -> Checkpoint:
    """Checkpoint named in the configuration or produced by an earlier step."""
    return load_checkpoint(artifact_path(inputs, configured, "checkpoint", key))
