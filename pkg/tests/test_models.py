#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
from __future__ import annotations

import numpy as np
import pytest

from oarepo_neural_operator.errors import ConfigurationError, ContractError
from oarepo_neural_operator.grid import FieldSample, Grid
from oarepo_neural_operator.nop import (
    AttentionNeuralOperator,
    DeepONet,
    FourierNeuralOperator,
    FourierNeuralOperator3d,
    GraphNeuralOperator,
    GreenKernelOperator,
    LowRankNeuralOperator,
    MultipoleGraphNeuralOperator,
    build_model,
    model_forward,
)
from oarepo_neural_operator.random_fields import Rng
from oarepo_neural_operator.tensor import no_grad


def _small_fno(**overrides):
    params = {"dims": 1, "width": 8, "layers": 2, "kmax": 4, "projection_hidden": 8, "seed": 3}
    params.update(overrides)
    return FourierNeuralOperator(**params)


def _inputs(*shape, seed=0):
    return np.random.default_rng(seed).normal(size=shape)


def test_zero_layer_model_is_pointwise(periodic_grid_1d):
    model = _small_fno(layers=0)
    a = _inputs(1, 64, 1)
    b = a.copy()
    b[0, 5, 0] += 1.0
    diff = model.predict_batch(b, periodic_grid_1d) - model.predict_batch(a, periodic_grid_1d)
    changed = np.flatnonzero(np.abs(diff[0, :, 0]) > 0)
    assert set(changed) <= {5}


def test_same_seed_same_model(periodic_grid_1d):
    a = _inputs(2, 64, 1)
    first, second = _small_fno(), _small_fno()
    assert np.array_equal(first.predict_batch(a, periodic_grid_1d), second.predict_batch(a, periodic_grid_1d))
    assert not np.array_equal(
        first.predict_batch(a, periodic_grid_1d), _small_fno(seed=4).predict_batch(a, periodic_grid_1d)
    )


def test_rollout_equals_chained_steps(periodic_grid_1d):
    model = _small_fno(in_channels=3, autoregressive=True)
    window = _inputs(1, 64, 3)
    rollout = model.predict_batch(window, periodic_grid_1d, steps=3)
    assert rollout.shape == (1, 64, 3)
    with no_grad():
        for t in range(3):
            following = model.step(window, periodic_grid_1d).numpy()
            assert np.allclose(rollout[..., t : t + 1], following, rtol=0, atol=1e-12)
            window = np.concatenate([window[..., 1:], following], axis=-1)


def test_fourier_parameter_count_is_resolution_free():
    model = _small_fno()
    width, modes = 8, 8
    lift = (1 + 1) * width + width
    layer = 2 * modes * width * width + width * width + width
    project = width * 8 + 8 + 8 * 1 + 1
    assert model.num_parameters() == lift + 2 * layer + project
    for s in (32, 64, 128):
        grid = Grid.uniform(s, periodic=True)
        assert model.predict_batch(_inputs(1, s, 1), grid).shape == (1, s, 1)
    assert model.num_parameters() == lift + 2 * layer + project


def test_fourier_2d_model(periodic_grid_2d):
    model = FourierNeuralOperator(dims=2, width=4, layers=1, kmax=3, projection_hidden=4)
    assert model.predict_batch(_inputs(2, 16, 16, 1), periodic_grid_2d).shape == (2, 16, 16, 1)


def test_model_rejects_other_dimension(periodic_grid_2d):
    with pytest.raises(ConfigurationError):
        _small_fno().predict_batch(_inputs(1, 16, 16, 1), periodic_grid_2d)


def test_model_rejects_other_channel_count(periodic_grid_1d):
    with pytest.raises(ConfigurationError):
        _small_fno().predict_batch(_inputs(1, 64, 2), periodic_grid_1d)


def test_fourier_model_input_gradients(gradcheck):
    grid = Grid.uniform(8, periodic=True)
    model = _small_fno(kmax=2, activation="tanh")
    gradcheck(lambda x: (model.forward_batch(x, grid) ** 2).sum(), _inputs(1, 8, 1))


def test_space_time_model_shapes(periodic_grid_2d):
    model = FourierNeuralOperator3d(
        in_channels=2, width=4, layers=1, kmax=(2, 2, 2), time_steps=4, pad_t=2, projection_hidden=4
    )
    assert model.predict_batch(_inputs(1, 16, 16, 2), periodic_grid_2d).shape == (1, 16, 16, 4)
    assert model.predict_batch(_inputs(1, 16, 16, 2), periodic_grid_2d, steps=3).shape == (1, 16, 16, 3)


def _small_gno():
    return GraphNeuralOperator(
        dims=2, width=4, layers=1, radius=0.3, subsample=20, kernel_hidden=(8,), projection_hidden=4
    )


def test_graph_model_prediction_is_reproducible():
    grid = Grid.uniform(8, dims=2)
    model = _small_gno()
    a = _inputs(1, 8, 8, 1)
    first = model.predict_batch(a, grid, Rng(0, 1))
    assert first.shape == (1, 8, 8, 1)
    assert np.array_equal(first, model.predict_batch(a, grid, Rng(0, 1)))


def test_graph_model_trains_on_subsamples():
    grid = Grid.uniform(8, dims=2)
    model = _small_gno()
    pred, truth = model.training_batch(_inputs(3, 8, 8, 1), _inputs(3, 8, 8, 1, seed=1), grid, Rng(2))
    assert pred.shape == (3, 20, 1)
    assert truth.shape == (3, 20, 1)


def test_multipole_model_orthogonal_levels():
    grid = Grid.uniform(9, dims=2)
    model = MultipoleGraphNeuralOperator(
        width=4, layers=2, level_sizes=(81, 25, 9), radii=(0.2, 0.4, 0.8), construction="orthogonal",
        kernel_hidden=(4,), projection_hidden=4,
    )
    assert model.predict_batch(_inputs(1, 9, 9, 1), grid).shape == (1, 9, 9, 1)


def test_multipole_model_random_levels():
    grid = Grid.uniform(8, dims=2)
    model = MultipoleGraphNeuralOperator(
        width=4, layers=1, level_sizes=(30, 10), radii=(0.3, 0.6), kernel_hidden=(4,), projection_hidden=4
    )
    pred, truth = model.training_batch(_inputs(2, 8, 8, 1), _inputs(2, 8, 8, 1, seed=1), grid, Rng(5))
    assert pred.shape == (2, 30, 1) and truth.shape == (2, 30, 1)
    assert model.predict_batch(_inputs(1, 8, 8, 1), grid).shape == (1, 8, 8, 1)


def test_multipole_model_rejects_unknown_construction():
    with pytest.raises(ConfigurationError):
        MultipoleGraphNeuralOperator(construction="spiral")


def test_low_rank_and_attention_models(periodic_grid_1d):
    a = _inputs(2, 64, 1)
    lno = LowRankNeuralOperator(width=4, layers=1, rank=2, factor_hidden=(8,), projection_hidden=4)
    attention = AttentionNeuralOperator(width=4, layers=1, key_dim=2, projection_hidden=4)
    assert lno.predict_batch(a, periodic_grid_1d).shape == (2, 64, 1)
    assert attention.predict_batch(a, periodic_grid_1d).shape == (2, 64, 1)


def test_deeponet_is_tied_to_its_sensor_grid(periodic_grid_1d):
    model = DeepONet(sensors=64, latent=4, branch_hidden=(8,), trunk_hidden=(8,))
    assert model.predict_batch(_inputs(2, 64, 1), periodic_grid_1d).shape == (2, 64, 1)
    with pytest.raises(ContractError, match="fixed-sensor architecture"):
        model.predict_batch(_inputs(1, 128, 1), Grid.uniform(128, periodic=True))


def test_deeponet_needs_sensor_count():
    with pytest.raises(ConfigurationError):
        DeepONet()


def test_green_kernel_model_is_quadrature():
    grid = Grid.uniform(17)
    model = GreenKernelOperator(kernel_hidden=(8,))
    f = FieldSample(grid, np.sin(np.pi * grid.axis_coordinates(0)))
    u = model_forward(model, f).scalar()
    kernel = model.kernel_matrix(grid.axis_coordinates(0))
    assert kernel.shape == (17, 17)
    assert np.allclose(u, kernel @ f.scalar() / 17, atol=1e-14)


def test_build_model_from_config():
    model = _small_fno()
    rebuilt = build_model(model.config())
    assert type(rebuilt) is FourierNeuralOperator
    state = model.state_dict()
    assert all(np.array_equal(state[k], v) for k, v in rebuilt.state_dict().items())


@pytest.mark.parametrize(
    "config",
    [{}, {"variant": "transformer"}, {"variant": "fno", "depth": 3}],
)
def test_build_model_rejects_bad_configs(config):
    with pytest.raises(ConfigurationError):
        build_model(config)
