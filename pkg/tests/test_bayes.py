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

from oarepo_neural_operator.bayes import (
    FunctionForwardMap,
    InverseProblemSpec,
    SolverForwardMap,
    SurrogateForwardMap,
    get_forward_map,
    interpolate_periodic,
    invert_compare,
    log_likelihood,
    observation_points,
    observe,
    pcn_chain,
    suggest_beta,
    synthetic_observations,
)
from oarepo_neural_operator.errors import ConfigurationError
from oarepo_neural_operator.grid import FieldSample, Grid
from oarepo_neural_operator.nop import FourierNeuralOperator
from oarepo_neural_operator.random_fields import MeasureSpec, Rng, eigenvalues, sample_grf


def _identity_spec(**overrides):
    params = {
        "prior": MeasureSpec.for_kind("ns_vorticity_ic"), "resolution": 16, "burn_in": 10, "samples": 50, "thin": 5,
    }
    params.update(overrides)
    return InverseProblemSpec(FunctionForwardMap(lambda v: v), **params)


def test_observation_points_order(periodic_grid_2d):
    points = observation_points(periodic_grid_2d, 7)
    assert points.shape == (49, 2)
    assert np.allclose(points[0], [1 / 8, 1 / 8])
    assert np.allclose(points[1], [2 / 8, 1 / 8])
    assert np.allclose(points[7], [1 / 8, 2 / 8])


def test_observing_a_constant(periodic_grid_2d):
    y = observe(FieldSample(periodic_grid_2d, np.full((16, 16), 2.5)), _identity_spec())
    assert np.allclose(y, 2.5, rtol=0, atol=1e-14)
    assert y.shape == (49,)


def test_observing_a_sine():
    grid = Grid.uniform(64, dims=2, periodic=True)
    x = grid.coordinates()[..., 0]
    y = observe(FieldSample(grid, np.sin(2 * np.pi * x)), _identity_spec(resolution=64))
    expected = np.sin(2 * np.pi * np.arange(1, 8) / 8)
    assert np.allclose(y.reshape(7, 7), expected[None, :], atol=1e-12)


def test_interpolation_between_nodes():
    grid = Grid.uniform(8, periodic=True)
    values = np.arange(8.0) ** 2
    field = FieldSample(grid, values)
    assert interpolate_periodic(field, [[0.5 / 8]])[0] == pytest.approx(0.5)
    assert interpolate_periodic(field, [[7.5 / 8]])[0] == pytest.approx(0.5 * (49.0 + 0.0))
    assert interpolate_periodic(field, [[1.25]])[0] == pytest.approx(values[2])


def test_log_likelihood_of_exact_observations(periodic_grid_2d, rng):
    spec = _identity_spec()
    w0 = sample_grf(spec.prior, periodic_grid_2d, rng)
    assert log_likelihood(w0, observe(w0, spec), spec) == 0.0


def test_log_likelihood_scale(periodic_grid_2d, rng):
    spec = _identity_spec(gamma=0.1)
    w0 = sample_grf(spec.prior, periodic_grid_2d, rng)
    y = observe(w0, spec)
    y[3] += np.sqrt(2.0) * 0.1
    assert log_likelihood(w0, y, spec) == pytest.approx(-1.0)
    literal = _identity_spec(gamma=0.1, literal_covariance=True)
    assert literal.noise_variance == pytest.approx(100.0)
    assert log_likelihood(w0, y, literal) == pytest.approx(-1e-4)


def test_log_likelihood_differences_match_gaussian_density():
    spec = InverseProblemSpec(
        FunctionForwardMap(lambda v: 3.0 * v), prior=MeasureSpec.for_kind("burgers_ic"), resolution=8, gamma=0.3
    )
    grid = spec.grid()
    gen = np.random.default_rng(0)
    a, b = FieldSample(grid, gen.normal(size=8)), FieldSample(grid, gen.normal(size=8))
    y = gen.normal(size=7)

    def gaussian_logpdf(mean):
        return -0.5 * np.sum((y - mean) ** 2) / 0.09 - 3.5 * np.log(2 * np.pi * 0.09)

    expected = gaussian_logpdf(3.0 * a.scalar()[1:]) - gaussian_logpdf(3.0 * b.scalar()[1:])
    assert log_likelihood(a, y, spec) - log_likelihood(b, y, spec) == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize(
    "options",
    [{"beta": 1.5}, {"beta": -0.1}, {"gamma": 0.0}, {"thin": 0}, {"prior": MeasureSpec.for_kind("poisson_source")}],
)
def test_spec_validation(options):
    with pytest.raises(ConfigurationError):
        _identity_spec(**options)


def test_synthetic_observations_are_noisy(periodic_grid_2d, rng):
    spec = _identity_spec(gamma=0.1)
    w0 = sample_grf(spec.prior, periodic_grid_2d, rng)
    y = synthetic_observations(w0, spec, Rng(5))
    residual = y - observe(w0, spec)
    assert 0.0 < np.std(residual) < 0.2


# pCN


def test_zero_step_accepts_everything(periodic_grid_2d, rng):
    spec = _identity_spec(beta=0.0)
    w0 = sample_grf(spec.prior, periodic_grid_2d, rng)
    result = pcn_chain(spec, observe(w0, spec) + 1.0, Rng(2), initial=w0)
    assert result.acceptance_rate == 1.0
    assert result.accepted == result.proposals == 50
    assert np.allclose(result.mean.values, w0.values, rtol=0, atol=1e-12)
    assert result.samples.shape == (10, 16, 16, 1)
    assert np.all(result.samples == w0.values[None])


def test_chain_is_reproducible(periodic_grid_2d):
    spec = _identity_spec(beta=0.2)
    y = np.zeros(49)
    first, second = pcn_chain(spec, y, Rng(4)), pcn_chain(spec, y, Rng(4))
    assert np.array_equal(first.mean.values, second.mean.values)
    assert first.accepted == second.accepted


def test_flat_likelihood_keeps_the_prior():
    spec = InverseProblemSpec(
        FunctionForwardMap(lambda v: 0.0 * v),
        prior=MeasureSpec.for_kind("burgers_ic"),
        resolution=8,
        beta=0.5,
        burn_in=100,
        samples=20000,
        thin=10,
    )
    result = pcn_chain(spec, np.zeros(7), Rng(6))
    assert result.acceptance_rate == 1.0
    prior_variance = eigenvalues(spec.prior, spec.grid()).sum() / spec.grid().volume
    assert np.allclose(result.samples.var(axis=0).ravel(), prior_variance, rtol=0.2)


@pytest.mark.slow
def test_linear_gaussian_posterior_mean():
    spec = InverseProblemSpec(
        FunctionForwardMap(lambda v: v),
        prior=MeasureSpec.for_kind("burgers_ic"),
        resolution=8,
        gamma=0.1,
        beta=0.1,
        burn_in=5000,
        samples=200000,
        thin=1000,
    )
    grid = spec.grid()
    truth = sample_grf(spec.prior, grid, Rng(8))
    y = synthetic_observations(truth, spec, Rng(9))

    lam = eigenvalues(spec.prior, grid)
    n = np.arange(8)
    k = np.arange(8)
    phase = 2 * np.pi * k[None, None, :] * (n[:, None, None] - n[None, :, None]) / 8
    prior_cov = np.einsum("k,nmk->nm", lam, np.cos(phase)) / grid.volume
    select = np.eye(8)[1:]
    gain = prior_cov @ select.T @ np.linalg.inv(select @ prior_cov @ select.T + 0.01 * np.eye(7))
    exact = gain @ y

    result = pcn_chain(spec, y, Rng(10))
    mean = result.mean.scalar()
    assert np.linalg.norm(mean - exact) / np.linalg.norm(exact) < 0.02


def test_suggest_beta():
    assert suggest_beta(0.2, 0.01) == 0.1
    assert suggest_beta(0.2, 0.99) == 0.4
    assert suggest_beta(0.0, 1.0) == 0.01
    assert suggest_beta(0.2, 0.3) == 0.2


def test_identical_forward_maps_give_identical_chains(tmp_path):
    solver_spec = _identity_spec(beta=0.3)
    surrogate_spec = _identity_spec(beta=0.3)
    comparison = invert_compare(solver_spec, surrogate_spec, np.full(49, 0.5), seed=3)
    assert np.array_equal(comparison.solver.mean.values, comparison.surrogate.mean.values)
    assert comparison.mean_difference == 0.0
    assert [row["forward_map"] for row in comparison.timing] == ["function", "function"]

    comparison.save(tmp_path)
    for name in ("solver", "surrogate"):
        assert (tmp_path / name / "manifest.json").exists()
        assert (tmp_path / name / "pushforward.bin").exists()
    with (tmp_path / "timing.csv").open(encoding="utf-8") as f:
        assert next(csv.reader(f)) == ["forward_map", "calls", "seconds", "seconds_per_call"]


# forward maps


def test_solver_forward_map_counts_calls(periodic_grid_2d, rng):
    fm = get_forward_map("solver", t_end=0.01, dt=1e-3)
    assert isinstance(fm, SolverForwardMap)
    w0 = sample_grf(MeasureSpec.for_kind("ns_vorticity_ic"), periodic_grid_2d, rng)
    assert fm(w0).grid == periodic_grid_2d
    assert fm.calls == 1 and fm.seconds > 0
    fm.reset_timing()
    assert fm.seconds_per_call == 0.0


def test_surrogate_forward_map_returns_scalar(periodic_grid_2d, rng):
    model = FourierNeuralOperator(in_channels=1, out_channels=2, dims=2, width=4, layers=1, kmax=3, projection_hidden=4)
    w0 = sample_grf(MeasureSpec.for_kind("ns_vorticity_ic"), periodic_grid_2d, rng)
    out = SurrogateForwardMap(model)(w0)
    assert out.channels == 1
    assert np.array_equal(out.values[..., 0], model.predict(w0).values[..., -1])


def test_unknown_forward_map():
    with pytest.raises(ConfigurationError, match="Forward map oracle is not defined"):
        get_forward_map("oracle")
