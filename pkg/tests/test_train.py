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

from oarepo_neural_operator.errors import ConfigurationError, DimensionError, DomainError, NumericalError
from oarepo_neural_operator.grid import FieldSample, Grid
from oarepo_neural_operator.nop import FourierNeuralOperator, FourierNeuralOperator3d, Parameter
from oarepo_neural_operator.pde import Dataset
from oarepo_neural_operator.tensor import Tensor, no_grad
from oarepo_neural_operator.train import (
    AdamState,
    NormalizedModel,
    TrainConfig,
    UnitGaussianNormalizer,
    adam_step,
    learning_rate,
    load_checkpoint,
    mse_loss,
    relative_l2,
    relative_l2_loss,
    relative_l2_values,
    save_checkpoint,
    train,
)


def _model(**overrides):
    params = {"dims": 1, "width": 8, "layers": 1, "kmax": 4, "projection_hidden": 8, "seed": 0}
    params.update(overrides)
    return FourierNeuralOperator(**params)


# losses


def test_relative_l2_examples():
    grid = Grid.uniform(5)
    truth = FieldSample(grid, np.arange(1.0, 6.0))
    assert relative_l2(truth, truth) == 0.0
    assert relative_l2(truth.with_values(np.zeros((5, 1))), truth) == pytest.approx(1.0)
    assert relative_l2(truth.with_values(2 * truth.values), truth) == pytest.approx(1.0)


def test_relative_l2_of_zero_truth():
    grid = Grid.uniform(5)
    with pytest.raises(DomainError):
        relative_l2(FieldSample(grid, np.ones(5)), FieldSample(grid, np.zeros(5)))


def test_relative_l2_needs_same_grid():
    with pytest.raises(ConfigurationError):
        relative_l2(FieldSample(Grid.uniform(5), np.ones(5)), FieldSample(Grid.uniform(6), np.ones(6)))


def test_relative_l2_values_are_per_sample():
    truth = np.array([[3.0, 4.0], [1.0, 0.0]])
    pred = np.array([[3.0, 4.0], [0.0, 0.0]])
    assert np.allclose(relative_l2_values(pred, truth), [0.0, 1.0])
    with pytest.raises(DimensionError):
        relative_l2_values(pred, truth[:1])


def test_loss_gradients(gradcheck):
    truth = np.random.default_rng(0).normal(size=(3, 4, 1))
    pred = truth + np.random.default_rng(1).normal(size=(3, 4, 1))
    gradcheck(lambda p: relative_l2_loss(p, truth), pred)
    gradcheck(lambda p: mse_loss(p, truth), pred)


def test_relative_loss_matches_values():
    truth = np.random.default_rng(2).normal(size=(4, 6, 1))
    pred = truth * 1.5
    assert relative_l2_loss(Tensor(pred), truth).item() == pytest.approx(relative_l2_values(pred, truth).mean())


# Adam


def test_zero_gradient_leaves_parameters():
    param = Parameter(np.array([1.0, -2.0]))
    state = adam_step([("w", param)], AdamState(), lr=1e-3, grads={"w": np.zeros(2)})
    assert np.array_equal(param.data, [1.0, -2.0])
    assert state.step == 1


def test_first_adam_step():
    param = Parameter(np.zeros(1))
    adam_step([("w", param)], AdamState(), lr=1e-3, grads={"w": np.ones(1)})
    assert param.data[0] == pytest.approx(-1e-3 / (1.0 + 1e-8), rel=1e-12)


def test_alternating_gradients_stay_bounded():
    param = Parameter(np.zeros(1))
    state = AdamState()
    adam_step([("w", param)], state, lr=1e-3, grads={"w": np.ones(1)})
    before = param.data.copy()
    adam_step([("w", param)], state, lr=1e-3, grads={"w": -np.ones(1)})
    assert abs(param.data[0] - before[0]) < 2e-3


def test_missing_gradient_counts_as_zero():
    param = Parameter(np.ones(3))
    adam_step([("w", param)], AdamState(), lr=1e-3)
    assert np.array_equal(param.data, np.ones(3))


def test_non_finite_gradient_names_parameter():
    a, b = Parameter(np.zeros(2)), Parameter(np.zeros(2))
    with pytest.raises(NumericalError, match="layers.0.weight"):
        grads = {"lift": np.zeros(2), "layers.0.weight": np.array([0.0, np.nan])}
        adam_step([("lift", a), ("layers.0.weight", b)], AdamState(), 1e-3, grads=grads)
    assert np.array_equal(a.data, np.zeros(2))


def test_gradient_shape_must_match():
    with pytest.raises(DimensionError):
        adam_step([("w", Parameter(np.zeros(2)))], AdamState(), 1e-3, grads={"w": np.zeros(3)})


def test_learning_rate_schedule():
    assert learning_rate(0, 1e-3, 100) == 1e-3
    assert learning_rate(99, 1e-3, 100) == 1e-3
    assert learning_rate(100, 1e-3, 100) == 5e-4
    assert learning_rate(250, 1e-3, 100) == 2.5e-4


# configuration


@pytest.mark.parametrize(
    ("options", "key"),
    [
        ({"epochs": -1}, "train.epochs"),
        ({"initial_lr": 0.0}, "train.initial_lr"),
        ({"batch_size": 0}, "train.batch_size"),
        ({"loss": "huber"}, "train.loss"),
        ({"momentum": 0.9}, "train.momentum"),
    ],
)
def test_train_config_validation(options, key):
    with pytest.raises(ConfigurationError) as exc:
        TrainConfig.from_dict(options)
    assert exc.value.key == key


def test_train_config_defaults():
    cfg = TrainConfig()
    assert (cfg.epochs, cfg.initial_lr, cfg.halve_every, cfg.batch_size) == (500, 1e-3, 100, 20)
    assert TrainConfig.from_dict(cfg.to_dict()) == cfg


# loop


def test_zero_epochs_returns_initial_model(linear_dataset):
    model = _model()
    before = model.state_dict()
    result = train(model, linear_dataset, TrainConfig(epochs=0))
    assert len(result.history) == 0
    assert all(np.array_equal(before[k], v) for k, v in result.model.state_dict().items())


def test_empty_dataset_is_rejected(linear_dataset):
    with pytest.raises(ConfigurationError):
        train(_model(), linear_dataset.subset([]), TrainConfig(epochs=1))


def test_training_is_deterministic(linear_dataset):
    cfg = TrainConfig(epochs=3, batch_size=4, seed=5)
    first = train(_model(), linear_dataset, cfg)
    second = train(_model(), linear_dataset, cfg)
    assert np.array_equal(first.history.column("train_err"), second.history.column("train_err"))
    state = first.model.state_dict()
    assert all(np.array_equal(state[k], v) for k, v in second.model.state_dict().items())


def test_training_reduces_error(linear_dataset):
    train_set, test_set = linear_dataset.split(8)
    result = train(_model(), train_set, TrainConfig(epochs=30, batch_size=4, initial_lr=1e-2), test_set)
    errors = result.history.column("train_err")
    assert errors[-1] < errors[0]
    assert np.all(np.isfinite(result.history.column("test_err")))


@pytest.mark.slow
def test_linear_operator_is_learned(linear_dataset):
    train_set, test_set = linear_dataset.split(10)
    cfg = TrainConfig(epochs=200, batch_size=5, initial_lr=1e-2, halve_every=50)
    result = train(_model(width=16, layers=2), train_set, cfg, test_set)
    assert result.history.column("test_err")[-1] < 0.05


def test_early_stopping(linear_dataset):
    train_set, test_set = linear_dataset.split(8)
    cfg = TrainConfig(epochs=50, batch_size=4, initial_lr=1e-300, patience=2)
    result = train(_model(), train_set, cfg, test_set)
    assert len(result.history) == 3


def test_outputs_are_written(linear_dataset, tmp_path):
    result = train(_model(), linear_dataset, TrainConfig(epochs=2, batch_size=6), output_dir=tmp_path)
    assert result.checkpoint == tmp_path / "checkpoint"
    with (tmp_path / "history.csv").open(encoding="utf-8") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["epoch", "lr", "train_err", "test_err"]
    assert [row[0] for row in rows[1:]] == ["0", "1"]


def test_checkpoint_round_trip(linear_dataset, tmp_path, periodic_grid_1d):
    model = _model()
    save_checkpoint(tmp_path / "ckpt", model, epoch=7, metadata={"problem": "linear"})
    restored = load_checkpoint(tmp_path / "ckpt")
    assert restored.epoch == 7
    assert restored.manifest["problem"] == "linear"
    a = linear_dataset.input_array()
    assert np.array_equal(restored.model.predict_batch(a, periodic_grid_1d), model.predict_batch(a, periodic_grid_1d))


def test_missing_checkpoint(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_checkpoint(tmp_path / "nothing")


# normalisation


def test_normalizer_statistics_and_inverse():
    values = np.random.default_rng(3).normal(loc=[2.0, -1.0], scale=[3.0, 0.5], size=(50, 16, 2))
    normalizer = UnitGaussianNormalizer.fit(values)
    encoded = normalizer.encode(values)
    assert np.allclose(encoded.mean(axis=(0, 1)), 0.0, atol=1e-12)
    assert np.allclose(encoded.std(axis=(0, 1)), 1.0, atol=1e-4)
    assert np.allclose(normalizer.decode(encoded), values)
    restored = UnitGaussianNormalizer.from_dict(normalizer.to_dict())
    assert np.array_equal(restored.mean, normalizer.mean) and np.array_equal(restored.std, normalizer.std)


def test_normalized_training_checkpoint(linear_dataset, tmp_path, periodic_grid_1d):
    result = train(_model(), linear_dataset, TrainConfig(epochs=1, normalize=True), output_dir=tmp_path)
    assert isinstance(result.model, NormalizedModel)
    restored = load_checkpoint(tmp_path / "checkpoint").model
    assert isinstance(restored, NormalizedModel)
    a = linear_dataset.input_array()
    assert np.allclose(restored.predict_batch(a, periodic_grid_1d), result.model.predict_batch(a, periodic_grid_1d))


def _trajectories(grid, n=6, steps=5, seed=11):
    """Travelling sine waves around an offset, time along the last axis."""
    rng = np.random.default_rng(seed)
    x = grid.coordinates()[..., 0][None, :, None]
    t = np.arange(steps)[None, None, :]
    amplitude = rng.normal(size=(n, 1, 1))
    phase = rng.uniform(0.0, 2 * np.pi, size=(n, 1, 1))
    return 4.0 + amplitude * np.sin(2 * np.pi * x + phase + 0.3 * t)


def test_normalized_rollout_feeds_back_physical_units():
    grid = Grid.uniform(32, periodic=True)
    values = _trajectories(grid)
    inputs, outputs = values[..., :2], values[..., 2:]
    model = _model(in_channels=2, autoregressive=True)
    normalized = NormalizedModel.fit(model, inputs, outputs)
    assert normalized.output_normalizer.mean.shape == (1,)

    window, expected = inputs.copy(), []
    for _ in range(3):
        with no_grad():
            raw = model.step(normalized.input_normalizer.encode(window), grid).numpy()
        following = normalized.output_normalizer.decode(raw)
        expected.append(following)
        window = np.concatenate([window[..., 1:], following], axis=-1)
    rollout = normalized.predict_batch(inputs, grid, steps=3)
    assert np.allclose(rollout, np.concatenate(expected, axis=-1), rtol=1e-12, atol=1e-12)


def test_normalized_rollout_any_horizon():
    grid = Grid.uniform(32, periodic=True)
    values = _trajectories(grid)
    inputs, outputs = values[..., :2], values[..., 2:]
    normalized = NormalizedModel.fit(_model(in_channels=2, autoregressive=True), inputs, outputs)
    three = normalized.predict_batch(inputs, grid, steps=3)
    five = normalized.predict_batch(inputs, grid, steps=5)
    assert five.shape == (6, 32, 5)
    assert np.allclose(five[..., :3], three)
    assert normalized.predict_batch(inputs, grid, steps=2).shape == (6, 32, 2)


def test_per_step_statistics_name_the_horizon():
    grid = Grid.uniform(32, periodic=True)
    values = _trajectories(grid)
    inputs, outputs = values[..., :2], values[..., 2:]
    model = _model(in_channels=2, autoregressive=True)
    fixed = NormalizedModel(model, UnitGaussianNormalizer.fit(inputs), UnitGaussianNormalizer.fit(outputs))
    with pytest.raises(ConfigurationError, match="3 fixed time steps"):
        fixed.predict_batch(inputs, grid, steps=3)


def test_normalized_space_time_model_any_horizon(periodic_grid_2d):
    rng = np.random.default_rng(5)
    inputs = 2.0 + rng.normal(size=(4, 16, 16, 2))
    outputs = 2.0 + rng.normal(size=(4, 16, 16, 3))
    model = FourierNeuralOperator3d(
        in_channels=2, width=4, layers=1, kmax=(2, 2, 2), time_steps=3, pad_t=2, projection_hidden=4
    )
    normalized = NormalizedModel.fit(model, inputs, outputs)
    assert normalized.output_normalizer.mean.shape == (1,)
    assert normalized.predict_batch(inputs, periodic_grid_2d).shape == (4, 16, 16, 3)
    assert normalized.predict_batch(inputs, periodic_grid_2d, steps=5).shape == (4, 16, 16, 5)


def test_normalized_autoregressive_training(tmp_path):
    grid = Grid.uniform(32, periodic=True)
    values = _trajectories(grid, n=6, steps=5)
    dataset = Dataset(
        [FieldSample(grid, v[..., :2]) for v in values],
        [FieldSample(grid, v[..., 2:]) for v in values],
        {"problem": "trajectory"},
    )
    model = _model(in_channels=2, autoregressive=True)
    result = train(model, dataset, TrainConfig(epochs=2, batch_size=3, normalize=True), output_dir=tmp_path)
    assert isinstance(result.model, NormalizedModel)
    assert np.all(np.isfinite(result.history.column("train_err")))

    restored = load_checkpoint(tmp_path / "checkpoint").model
    assert isinstance(restored, NormalizedModel) and restored.autoregressive
    a = dataset.input_array()
    assert np.allclose(restored.predict_batch(a, grid, steps=4), result.model.predict_batch(a, grid, steps=4))
