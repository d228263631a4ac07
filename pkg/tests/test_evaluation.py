#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
from __future__ import annotations

import csv

import numpy as np
import pytest

from oarepo_neural_operator.errors import ConfigurationError, ContractError
from oarepo_neural_operator.evaluation import (
    ErrorEntry,
    ErrorReport,
    compare_spectra,
    compare_trajectory_spectra,
    config_fingerprint,
    default_band,
    evaluate,
    noisy_copy,
    resolution_sweep,
    robustness_study,
    superresolution,
)
from oarepo_neural_operator.grid import FieldSample
from oarepo_neural_operator.nop import DeepONet, FourierNeuralOperator, OperatorModel
from oarepo_neural_operator.random_fields import Rng
from oarepo_neural_operator.tensor import Tensor, as_tensor
from oarepo_neural_operator.train import TrainConfig


class ScaleModel(OperatorModel):
    """Multiplies the input by a constant."""

    variant = "scale"

    def __init__(self, factor: float) -> None:
        super().__init__(in_channels=1, out_channels=1, factor=factor)

    def forward_batch(self, inputs, grid, rng=None, steps=None):
        return as_tensor(inputs) * self.hyperparameters["factor"]


def test_perfect_model_has_zero_error(linear_dataset):
    entry = evaluate(ScaleModel(3.0), linear_dataset)
    assert entry.error == 0.0
    assert (entry.resolution, entry.samples) == (64, 12)


def test_zero_model_has_unit_error(linear_dataset):
    assert evaluate(ScaleModel(0.0), linear_dataset).error == pytest.approx(1.0)


def test_error_does_not_depend_on_sample_order(linear_dataset):
    model = ScaleModel(2.5)
    shuffled = linear_dataset.subset(np.random.default_rng(0).permutation(12))
    assert evaluate(model, shuffled).error == pytest.approx(evaluate(model, linear_dataset).error, rel=1e-14)


def test_evaluate_rejects_empty_dataset(linear_dataset):
    with pytest.raises(ConfigurationError):
        evaluate(ScaleModel(3.0), linear_dataset.subset([]))


def test_resolution_sweep_keeps_parameters(linear_dataset):
    model = FourierNeuralOperator(dims=1, width=4, layers=1, kmax=4, projection_hidden=4)
    before = model.state_dict()
    report = resolution_sweep(model, [linear_dataset, linear_dataset.downsample(2)])
    assert report.resolutions == [32, 64]
    assert report.fingerprint == config_fingerprint(model.config())
    assert all(np.array_equal(before[k], v) for k, v in model.state_dict().items())


def test_fixed_sensor_model_cannot_sweep(linear_dataset):
    model = DeepONet(sensors=64, latent=4, branch_hidden=(4,), trunk_hidden=(4,))
    with pytest.raises(ContractError, match="fixed-sensor architecture"):
        resolution_sweep(model, [linear_dataset, linear_dataset.downsample(2)])
    with pytest.raises(ContractError, match="fixed-sensor architecture"):
        superresolution(model, linear_dataset, train_resolution=32)
    assert resolution_sweep(model, [linear_dataset]).resolutions == [64]


def test_superresolution_entry(linear_dataset):
    entry = superresolution(ScaleModel(3.0), linear_dataset, train_resolution=32)
    assert entry.label == "superres"
    assert entry.error == 0.0


# reports


def test_report_sorts_by_resolution(tmp_path):
    report = ErrorReport(fingerprint="abc")
    for resolution, error in ((256, 0.02), (64, 0.03), (128, 0.025)):
        report.add(ErrorEntry(resolution, error, 100))
    assert report.resolutions == [64, 128, 256]
    assert report.spread() == pytest.approx(1.5)
    report.save(tmp_path)
    with (tmp_path / "report.csv").open(encoding="utf-8") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["resolution", "rel_l2", "samples", "label", "fingerprint"]
    assert [row[0] for row in rows[1:]] == ["64", "128", "256"]
    text = (tmp_path / "report.txt").read_text(encoding="utf-8").splitlines()
    assert text[0] == "# config abc"
    assert text[1].split() == ["resolution", "rel_l2", "samples", "label"]
    assert text[2].split()[:2] == ["64", "0.0300"]


def test_error_entries_are_nonnegative():
    with pytest.raises(ConfigurationError):
        ErrorEntry(64, -0.1, 10)
    with pytest.raises(ConfigurationError):
        ErrorEntry(64, float("nan"), 10)


def test_fingerprint_ignores_key_order():
    assert config_fingerprint({"a": 1, "b": [1, 2]}) == config_fingerprint({"b": [1, 2], "a": 1})
    assert config_fingerprint({"a": 1}) != config_fingerprint({"a": 2})


# robustness


def test_zero_noise_gives_equal_arms(linear_dataset):
    result = robustness_study(ScaleModel(2.0), linear_dataset, Rng(1), noise_level=0.0)
    assert result.clean_trained[0] == result.clean_trained[1]
    assert result.noise_trained is None
    assert result.clean_trained_gap == 0.0


def test_noisy_copy_changes_inputs_only(linear_dataset):
    noisy = noisy_copy(linear_dataset, 0.1, Rng(2))
    assert not np.array_equal(noisy.input_array(), linear_dataset.input_array())
    assert np.array_equal(noisy.output_array(), linear_dataset.output_array())


def test_robustness_with_retraining(linear_dataset):
    train_set, test_set = linear_dataset.split(8)

    def factory():
        return FourierNeuralOperator(dims=1, width=4, layers=1, kmax=4, projection_hidden=4)

    result = robustness_study(
        factory(), test_set, Rng(3), 0.1, train_set, TrainConfig(epochs=2, batch_size=4), factory
    )
    assert result.noise_trained is not None
    report = result.to_report(64, len(test_set))
    assert sorted(e.label for e in report.entries) == [
        "clean_train/clean_test", "clean_train/noisy_test", "noisy_train/clean_test", "noisy_train/noisy_test",
    ]


# spectra


def _snapshot(periodic_grid_2d, seed):
    values = np.random.default_rng(seed).normal(size=periodic_grid_2d.sizes)
    return FieldSample(periodic_grid_2d, values - values.mean())


def test_identical_snapshots_have_identical_spectra(periodic_grid_2d):
    w = _snapshot(periodic_grid_2d, 0)
    comparison = compare_spectra(w, w, band=(2, 6))
    assert np.array_equal(comparison.predicted.magnitude, comparison.truth.magnitude)
    assert comparison.predicted_slope == comparison.truth_slope


def test_slope_is_nan_for_narrow_band(periodic_grid_2d):
    w = _snapshot(periodic_grid_2d, 1)
    assert np.isnan(compare_spectra(w, w, band=(3, 3)).truth_slope)


def test_spectra_files(periodic_grid_2d, tmp_path):
    w = _snapshot(periodic_grid_2d, 2)
    paths = compare_spectra(w, w.with_values(0.5 * w.values)).save(tmp_path, "t10")
    assert [p.name for p in paths] == ["t10_pred.txt", "t10_true.txt"]
    assert paths[0].read_text(encoding="utf-8").startswith("# wavenumber magnitude")


def test_trajectory_spectra_per_snapshot(periodic_grid_2d):
    values = np.stack([_snapshot(periodic_grid_2d, s).scalar() for s in range(3)], axis=-1)
    trajectory = FieldSample(periodic_grid_2d, values)
    assert len(compare_trajectory_spectra(trajectory, trajectory)) == 3


def test_default_band():
    assert default_band(64) == (4, 10)
    assert default_band(16) == (4, 5)
    assert default_band(256) == (4, 42)
