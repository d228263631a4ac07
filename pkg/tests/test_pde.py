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

from oarepo_neural_operator.errors import ConfigurationError, DomainError
from oarepo_neural_operator.grid import FieldSample, Grid
from oarepo_neural_operator.pde import (
    Dataset,
    assemble_darcy,
    build_dataset,
    downsample,
    green_function,
    resolve_solver_params,
    solve_burgers,
    solve_darcy_fdm,
    solve_navier_stokes,
    solve_poisson_green,
)
from oarepo_neural_operator.random_fields import MeasureSpec, Rng, sample_grf
from oarepo_neural_operator.spectral import spectrum


def _unit_square(s):
    return Grid.uniform(s, dims=2)


def _torus(s):
    return Grid.uniform(s, dims=2, periodic=True)


def _circle(s):
    return Grid.uniform(s, extent=(0.0, 2.0 * np.pi), periodic=True)


# Poisson


def test_green_function_values():
    assert green_function(0.5, 0.5) == pytest.approx(0.25)
    assert green_function(0.0, 0.3) == 0.0
    assert green_function(0.2, 0.7) == pytest.approx(green_function(0.7, 0.2))


def test_poisson_zero_source():
    grid = Grid.uniform(33)
    assert np.all(solve_poisson_green(FieldSample(grid, np.zeros(33))).values == 0.0)


def test_poisson_sine_source():
    grid = Grid.uniform(85)
    x = grid.axis_coordinates(0)
    u = solve_poisson_green(FieldSample(grid, np.sin(np.pi * x))).scalar()
    assert np.max(np.abs(u - np.sin(np.pi * x) / np.pi**2)) < 1e-3
    assert u[0] == 0.0 and u[-1] == pytest.approx(0.0, abs=1e-15)


def test_poisson_rejects_periodic_grid():
    grid = Grid.uniform(16, periodic=True)
    with pytest.raises(ConfigurationError):
        solve_poisson_green(FieldSample(grid, np.ones(16)))


# Darcy


def _series_center_value(terms=201):
    odd = np.arange(1, terms, 2, dtype=np.float64)
    m, n = np.meshgrid(odd, odd, indexing="ij")
    signs = np.sin(m * np.pi / 2) * np.sin(n * np.pi / 2)
    return float(np.sum(16.0 / (np.pi**4 * m * n * (m**2 + n**2)) * signs))


def test_darcy_constant_coefficient_matches_series():
    grid = _unit_square(85)
    u = solve_darcy_fdm(FieldSample(grid, np.ones(grid.sizes))).scalar()
    assert abs(u[42, 42] - _series_center_value()) < 1e-3


def test_darcy_boundary_is_zero(rng):
    spec = MeasureSpec.for_kind("darcy_coeff")
    a = sample_grf(spec, spec.grid(29), rng)
    u = solve_darcy_fdm(a).scalar()
    assert np.all(u[0, :] == 0.0) and np.all(u[-1, :] == 0.0)
    assert np.all(u[:, 0] == 0.0) and np.all(u[:, -1] == 0.0)
    assert np.all(u[1:-1, 1:-1] > 0.0)


def test_darcy_flux_balance(rng):
    spec = MeasureSpec.for_kind("darcy_coeff")
    a = sample_grf(spec, spec.grid(29), rng)
    matrix, rhs = assemble_darcy(a)
    u = solve_darcy_fdm(a).scalar()
    residual = np.linalg.norm(matrix @ u[1:-1, 1:-1].ravel() - rhs) / np.linalg.norm(rhs)
    assert residual < 1e-8


def test_darcy_cg_agrees_with_direct(rng):
    spec = MeasureSpec.for_kind("darcy_coeff")
    a = sample_grf(spec, spec.grid(29), rng)
    direct = solve_darcy_fdm(a).scalar()
    cg = solve_darcy_fdm(a, method="cg").scalar()
    assert np.max(np.abs(direct - cg)) < 1e-8


def test_darcy_second_order_refinement():
    solutions = []
    for s in (22, 43, 85):
        grid = _unit_square(s)
        xy = grid.coordinates()
        a = 1.0 + 0.5 * np.sin(np.pi * xy[..., 0]) * np.cos(np.pi * xy[..., 1])
        solutions.append(solve_darcy_fdm(FieldSample(grid, a)).scalar())
    coarse, middle, fine = solutions[0], solutions[1][::2, ::2], solutions[2][::4, ::4]
    ratio = np.max(np.abs(coarse - middle)) / np.max(np.abs(middle - fine))
    assert 3.0 <= ratio <= 5.0


def test_darcy_rejects_nonpositive_coefficient():
    grid = _unit_square(9)
    a = np.ones(grid.sizes)
    a[4, 4] = 0.0
    with pytest.raises(DomainError):
        solve_darcy_fdm(FieldSample(grid, a))


def test_darcy_unknown_method():
    grid = _unit_square(9)
    with pytest.raises(ConfigurationError):
        solve_darcy_fdm(FieldSample(grid, np.ones(grid.sizes)), method="multigrid")


# Burgers


def test_burgers_zero_stays_zero():
    grid = _circle(64)
    u = solve_burgers(FieldSample(grid, np.zeros(64)), t_end=0.1)
    assert np.all(u.values == 0.0)


def test_burgers_heat_only_is_exact():
    grid = _circle(64)
    x = grid.axis_coordinates(0)
    u = solve_burgers(FieldSample(grid, np.sin(x)), t_end=1.0, viscosity=0.1, nonlinear=False).scalar()
    assert np.max(np.abs(u - np.exp(-0.1) * np.sin(x))) < 1e-8


def test_burgers_temporal_convergence():
    grid = _circle(2048)
    u0 = FieldSample(grid, 0.5 * np.sin(grid.axis_coordinates(0)))
    fine = solve_burgers(u0, t_end=1.0, dt=1e-4).scalar()
    coarse = solve_burgers(u0, t_end=1.0, dt=2e-4).scalar()
    assert np.max(np.abs(fine - coarse)) < 1e-4


def test_burgers_norm_decays_for_large_viscosity():
    grid = _circle(128)
    u0 = FieldSample(grid, np.sin(grid.axis_coordinates(0)) + 0.5 * np.cos(3 * grid.axis_coordinates(0)))
    norms = [np.linalg.norm(solve_burgers(u0, t_end=t, viscosity=1.0, dt=1e-3).scalar()) for t in (0.1, 0.2, 0.4, 0.8)]
    assert all(later < earlier for earlier, later in zip(norms, norms[1:]))


def test_burgers_rejects_bad_arguments():
    with pytest.raises(ConfigurationError):
        solve_burgers(FieldSample(Grid.uniform(16), np.zeros(16)))
    with pytest.raises(ConfigurationError):
        solve_burgers(FieldSample(_circle(16), np.zeros(16)), viscosity=0.0)


# Navier-Stokes


def test_taylor_green_vortex_decays_exactly():
    grid = _torus(64)
    xy = grid.coordinates()
    w0 = 4.0 * np.pi * np.sin(2 * np.pi * xy[..., 0]) * np.sin(2 * np.pi * xy[..., 1])
    (w,) = solve_navier_stokes(
        FieldSample(grid, w0), t_end=1.0, viscosity=1e-2, record_every=1.0, dt=1e-3, forcing=None
    )
    expected = w0 * np.exp(-8.0 * np.pi**2 * 1e-2)
    assert np.linalg.norm(w.scalar() - expected) / np.linalg.norm(expected) < 1e-4


def test_navier_stokes_zero_stays_zero():
    grid = _torus(16)
    trajectory = solve_navier_stokes(
        FieldSample(grid, np.zeros(grid.sizes)), t_end=0.1, record_every=0.05, dt=1e-3, forcing=None
    )
    assert len(trajectory) == 2
    assert all(np.all(w.values == 0.0) for w in trajectory)


def test_navier_stokes_rejects_nonzero_mean():
    grid = _torus(16)
    with pytest.raises(DomainError):
        solve_navier_stokes(FieldSample(grid, np.ones(grid.sizes)), t_end=0.1, record_every=0.1, dt=1e-3)


def test_navier_stokes_record_spacing_must_divide_horizon():
    grid = _torus(16)
    with pytest.raises(ConfigurationError):
        solve_navier_stokes(FieldSample(grid, np.zeros(grid.sizes)), t_end=1.0, record_every=0.3, dt=1e-3)


def test_unforced_enstrophy_does_not_grow(rng):
    spec = MeasureSpec.for_kind("ns_vorticity_ic")
    w0 = sample_grf(spec, spec.grid(32), rng)
    trajectory = solve_navier_stokes(w0, t_end=1.0, viscosity=1e-2, record_every=0.25, dt=1e-3, forcing=None)
    norms = [np.linalg.norm(w0.scalar())] + [np.linalg.norm(w.scalar()) for w in trajectory]
    assert all(later <= earlier * (1 + 1e-8) for earlier, later in zip(norms, norms[1:]))


@pytest.mark.slow
def test_forced_turbulence_spectrum_slope():
    spec = MeasureSpec.for_kind("ns_vorticity_ic")
    w0 = sample_grf(spec, spec.grid(64), Rng(7))
    w = solve_navier_stokes(w0, t_end=50.0, viscosity=1e-3, record_every=50.0)[-1]
    slope = spectrum(w).fit_slope(4, 10)
    assert abs(slope + 5.0 / 3.0) < 0.5


# Downsampling


def test_downsample_factor_one_is_identity(periodic_grid_1d):
    field = FieldSample(periodic_grid_1d, np.arange(64.0))
    assert np.array_equal(downsample(field, 1).values, field.values)


def test_downsample_keeps_endpoints():
    grid = _unit_square(421)
    xy = grid.coordinates()
    field = FieldSample(grid, xy[..., 0] + 2 * xy[..., 1])
    coarse = downsample(field, 5)
    assert coarse.grid.sizes == (85, 85)
    assert coarse.values[0, 0, 0] == field.values[0, 0, 0]
    assert coarse.values[-1, -1, 0] == field.values[-1, -1, 0]
    assert np.allclose(coarse.scalar(), coarse.grid.coordinates()[..., 0] + 2 * coarse.grid.coordinates()[..., 1])


def test_downsample_periodic():
    grid = _circle(8192)
    coarse = downsample(FieldSample(grid, np.sin(grid.axis_coordinates(0))), 32)
    assert coarse.grid.sizes == (256,)
    assert np.allclose(coarse.scalar(), np.sin(coarse.grid.axis_coordinates(0)))


def test_downsample_requires_divisor():
    with pytest.raises(ConfigurationError):
        downsample(FieldSample(Grid.uniform(10), np.zeros(10)), 4)


def test_downsample_composes():
    grid = _unit_square(421)
    field = FieldSample(grid, np.random.default_rng(0).normal(size=grid.sizes))
    assert np.array_equal(downsample(downsample(field, 2), 5).values, downsample(field, 10).values)


# Dataset assembly


def test_empty_dataset_has_manifest(tmp_path):
    grid = Grid.uniform(17)
    dataset = build_dataset("poisson", 0, grid, Rng(1))
    assert len(dataset) == 0
    assert dataset.manifest["count"] == 0
    assert dataset.manifest["problem"] == "poisson"
    loaded = Dataset.load(dataset.save(tmp_path / "empty"))
    assert len(loaded) == 0
    assert loaded.input_grid == grid


def test_dataset_generation_is_deterministic(tmp_path):
    spec = MeasureSpec.for_kind("burgers_ic")
    params = {"t_end": 0.05, "dt": 1e-3}
    first = build_dataset("burgers", 3, spec.grid(64), Rng(11), params)
    second = build_dataset("burgers", 3, spec.grid(64), Rng(11), params, workers=2)
    first.save(tmp_path / "a")
    second.save(tmp_path / "b")
    assert (tmp_path / "a" / "inputs.bin").read_bytes() == (tmp_path / "b" / "inputs.bin").read_bytes()
    assert (tmp_path / "a" / "outputs.bin").read_bytes() == (tmp_path / "b" / "outputs.bin").read_bytes()


def test_dataset_save_load(tmp_path):
    dataset = build_dataset("poisson", 4, Grid.uniform(33), Rng(2))
    loaded = Dataset.load(dataset.save(tmp_path / "poisson"))
    assert np.array_equal(loaded.input_array(), dataset.input_array())
    assert np.array_equal(loaded.output_array(), dataset.output_array())
    assert loaded.manifest["problem"] == "poisson"
    assert loaded.manifest["seed"] == 2


def test_dataset_load_detects_tampering(tmp_path):
    directory = build_dataset("poisson", 2, Grid.uniform(17), Rng(2)).save(tmp_path / "poisson")
    data = bytearray((directory / "inputs.bin").read_bytes())
    data[0] ^= 0xFF
    (directory / "inputs.bin").write_bytes(bytes(data))
    with pytest.raises(ConfigurationError):
        Dataset.load(directory)


def test_dataset_split_and_downsample():
    dataset = build_dataset("poisson", 5, Grid.uniform(33), Rng(3))
    train, test = dataset.split(3)
    assert (len(train), len(test)) == (3, 2)
    coarse = test.downsample(4)
    assert coarse.resolution == 9
    assert coarse.manifest["source_resolution"] == 33
    assert coarse.manifest["downsample_factor"] == 4


def test_unknown_solver_parameter():
    with pytest.raises(ConfigurationError) as exc:
        resolve_solver_params("darcy", {"viscosity": 1.0})
    assert exc.value.key == "data.solver.viscosity"
    with pytest.raises(ConfigurationError):
        resolve_solver_params("heat", {})


def test_trajectory_dataset_stacks_records():
    spec = MeasureSpec.for_kind("ns_vorticity_ic")
    params = {"t_end": 0.04, "record_every": 0.01, "split": 0.02, "dt": 1e-3}
    dataset = build_dataset("ns_trajectory", 1, spec.grid(16), Rng(5), params)
    assert dataset.inputs[0].channels == 2
    assert dataset.outputs[0].channels == 2
