#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Monte-Carlo error estimates, resolution sweeps and the robustness protocol."""

from __future__ import annotations

import dataclasses
import logging
from typing import TYPE_CHECKING

from oarepo_neural_operator.errors import ConfigurationError, ContractError
from oarepo_neural_operator.evaluation.report import ErrorEntry, ErrorReport, config_fingerprint
from oarepo_neural_operator.nop.models import build_model
from oarepo_neural_operator.random_fields import add_noise
from oarepo_neural_operator.train import TrainConfig, dataset_errors, train

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from oarepo_neural_operator.nop.models import OperatorModel
    from oarepo_neural_operator.pde.dataset import Dataset
    from oarepo_neural_operator.random_fields import Rng

logger = logging.getLogger(__name__)


def evaluate(model: OperatorModel, dataset: Dataset, batch_size: int = 20, label: str = "") -> ErrorEntry:
    """Mean relative L2 error of ``model`` over ``dataset``."""
    if len(dataset) == 0:
        raise ConfigurationError("Cannot evaluate on an empty dataset", key="data.n_test")
    errors = dataset_errors(model, dataset.input_array(), dataset.output_array(), dataset.input_grid, batch_size)
    entry = ErrorEntry(dataset.resolution, float(errors.mean()), len(dataset), label)
    logger.info("Resolution %d: relative L2 %.6f over %d samples", entry.resolution, entry.error, entry.samples)
    return entry


def _require_transferable(model: OperatorModel, what: str) -> None:
    if not model.resolution_transferable:
        raise ContractError(
            f"fixed-sensor architecture: {model.variant} model has a parameter count tied to its training "
            f"discretization and cannot be used for {what}"
        )


def resolution_sweep(model: OperatorModel, datasets: Sequence[Dataset], batch_size: int = 20) -> ErrorReport:
    """Evaluate one model, without changing its parameters, on every dataset."""
    if len({d.resolution for d in datasets}) > 1:
        _require_transferable(model, "a resolution sweep")
    report = ErrorReport(fingerprint=config_fingerprint(model.config()))
    for dataset in datasets:
        report.add(evaluate(model, dataset, batch_size, label="sweep"))
    return report


def superresolution(
    model: OperatorModel, dataset: Dataset, train_resolution: int | None = None, batch_size: int = 20
) -> ErrorEntry:
    """Zero-shot evaluation on a finer grid than the model was trained on."""
    _require_transferable(model, "zero-shot super-resolution")
    if train_resolution is not None and dataset.resolution < train_resolution:
        logger.warning(
            "Super-resolution dataset (%d) is coarser than the training resolution (%d)",
            dataset.resolution,
            train_resolution,
        )
    return evaluate(model, dataset, batch_size, label="superres")


def noisy_copy(dataset: Dataset, level: float, rng: Rng) -> Dataset:
    """Dataset whose inputs carry pointwise Gaussian noise."""
    return dataset.map_inputs(lambda a: add_noise(a, level, rng))


@dataclasses.dataclass(frozen=True)
class RobustnessResult:
    """Clean and noisy test errors for the clean-trained and (optionally) noise-trained models."""

    clean_trained: tuple[float, float]
    noise_trained: tuple[float, float] | None = None

    @staticmethod
    def _gap(pair: tuple[float, float]) -> float:
        return abs(pair[1] - pair[0])

    @property
    def clean_trained_gap(self) -> float:
        """``|noisy - clean|`` of the clean-trained model."""
        return self._gap(self.clean_trained)

    @property
    def noise_trained_gap(self) -> float | None:
        """``|noisy - clean|`` of the noise-trained model."""
        return self._gap(self.noise_trained) if self.noise_trained else None

    def to_report(self, resolution: int, samples: int) -> ErrorReport:
        """Arms as labelled report entries."""
        report = ErrorReport()
        arms = [("clean_train", self.clean_trained)]
        if self.noise_trained:
            arms.append(("noisy_train", self.noise_trained))
        for name, (clean, noisy) in arms:
            report.add(ErrorEntry(resolution, clean, samples, f"{name}/clean_test"))
            report.add(ErrorEntry(resolution, noisy, samples, f"{name}/noisy_test"))
        return report


def robustness_study(
    model: OperatorModel,
    test_dataset: Dataset,
    rng: Rng,
    noise_level: float = 0.1,
    train_dataset: Dataset | None = None,
    train_config: TrainConfig | None = None,
    model_factory: Callable[[], OperatorModel] | None = None,
) -> RobustnessResult:
    """Errors on clean and noisy test inputs.

    When ``train_dataset`` is given, a fresh model (from ``model_factory`` or the
    configuration of ``model``) is trained on noisy inputs and tested the same way.
    """
    noisy_test = noisy_copy(test_dataset, noise_level, rng.spawn(0))
    clean_trained = (evaluate(model, test_dataset).error, evaluate(model, noisy_test).error)
    logger.info("Clean-trained model: clean %.6f noisy %.6f", *clean_trained)
    if train_dataset is None:
        return RobustnessResult(clean_trained)

    fresh = model_factory() if model_factory else build_model(model.config())
    noisy_train = noisy_copy(train_dataset, noise_level, rng.spawn(1))
    retrained = train(fresh, noisy_train, train_config or TrainConfig()).model
    noise_trained = (evaluate(retrained, test_dataset).error, evaluate(retrained, noisy_test).error)
    logger.info("Noise-trained model: clean %.6f noisy %.6f", *noise_trained)
    return RobustnessResult(clean_trained, noise_trained)
