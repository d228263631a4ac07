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

from oarepo_neural_operator.errors import ConfigurationError, DimensionError
from oarepo_neural_operator.grid import FieldSample, Grid
from oarepo_neural_operator.spectral import (
    ModeSet,
    enforce_conjugate_symmetry,
    fft,
    ifft,
    pad_modes,
    spectrum,
    truncate_modes,
)
from oarepo_neural_operator.tensor import ComplexTensor, Tensor


def naive_dft(v: np.ndarray) -> np.ndarray:
    n = len(v)
    k = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(k, k) / n) @ v


def test_constant_signal_has_only_dc():
    w = fft(Tensor(np.ones(8)), axes=(0,)).numpy()
    assert np.allclose(w, [8, 0, 0, 0, 0, 0, 0, 0], atol=1e-12)


def test_single_sine_mode():
    x = np.arange(16) / 16
    energy = np.abs(fft(Tensor(np.sin(2 * np.pi * x)), axes=(0,)).numpy())
    assert set(np.flatnonzero(energy > 1e-10)) == {1, 15}


@pytest.mark.parametrize("n", [8, 12, 16, 85])
def test_fft_matches_naive_dft(n):
    v = np.random.default_rng(n).normal(size=n)
    assert np.abs(fft(Tensor(v), axes=(0,)).numpy() - naive_dft(v)).max() < 1e-10


def test_round_trips():
    rng = np.random.default_rng(0)
    v = rng.normal(size=32)
    assert np.abs(ifft(fft(Tensor(v), axes=(0,)), axes=(0,)).numpy() - v).max() < 1e-10
    grid_values = rng.normal(size=(12, 20))
    back = ifft(fft(Tensor(grid_values), axes=(0, 1)), axes=(0, 1)).numpy()
    assert np.abs(back - grid_values).max() < 1e-10


def test_ifft_of_one_hot_is_basis_function():
    s = 10
    one_hot = np.zeros(s, dtype=complex)
    one_hot[2] = 1.0
    basis = ifft(ComplexTensor.from_numpy(one_hot), axes=(0,)).numpy()
    assert np.allclose(basis, np.exp(2j * np.pi * 2 * np.arange(s) / s) / s, atol=1e-14)


def test_fft_axis_out_of_range():
    with pytest.raises(DimensionError):
        fft(Tensor(np.ones((4, 4))), axes=(2,))


def test_parseval_and_linearity():
    rng = np.random.default_rng(1)
    u, v = rng.normal(size=(2, 12, 9))
    fu = fft(Tensor(u), axes=(0, 1)).numpy()
    assert np.isclose(np.sum(u**2), np.sum(np.abs(fu) ** 2) / u.size, rtol=1e-10)
    fv = fft(Tensor(v), axes=(0, 1)).numpy()
    combined = fft(Tensor(2.0 * u - 3.0 * v), axes=(0, 1)).numpy()
    assert np.abs(combined - (2.0 * fu - 3.0 * fv)).max() < 1e-10


def test_mode_set_corners():
    ms = ModeSet.for_grid((8,), 2)
    assert list(ms.axis_indices(0)) == [0, 1, 6, 7]
    assert ms.indices == [(0,), (1,), (6,), (7,)]
    w = fft(Tensor(np.random.default_rng(2).normal(size=8)), axes=(0,))
    block = truncate_modes(w, ms, axes=(0,)).numpy()
    assert np.array_equal(block, w.numpy()[[0, 1, 6, 7]])


def test_mode_set_cardinality():
    rng = np.random.default_rng(3)
    for _ in range(20):
        sizes = tuple(int(s) for s in rng.integers(4, 40, size=rng.integers(1, 4)))
        kmax = tuple(int(rng.integers(1, (s - 1) // 2 + 1)) for s in sizes)
        ms = ModeSet(sizes, kmax)
        assert len(ms) == int(np.prod([2 * k for k in kmax])) == len(ms.indices)


def test_cutoff_at_half_the_grid_is_rejected():
    with pytest.raises(ConfigurationError):
        ModeSet.for_grid((8,), 4)


def test_low_pass_is_a_projection():
    ms = ModeSet.for_grid((32,), 5)
    v = np.random.default_rng(4).normal(size=32)

    def low_pass(values):
        w = truncate_modes(fft(Tensor(values), axes=(0,)), ms, axes=(0,))
        return ifft(pad_modes(w, ms, axes=(0,)), axes=(0,)).numpy().real

    once = low_pass(v)
    assert np.abs(low_pass(once) - once).max() < 1e-12


def test_band_limited_signal_survives_truncation():
    ms = ModeSet.for_grid((20, 24), (4, 5))
    x, y = np.meshgrid(np.arange(20) / 20, np.arange(24) / 24, indexing="ij")
    v = 1.0 + np.sin(2 * np.pi * 3 * x) * np.cos(2 * np.pi * 4 * y) + np.cos(2 * np.pi * (x - 2 * y))
    w = truncate_modes(fft(Tensor(v), axes=(0, 1)), ms, axes=(0, 1))
    back = ifft(pad_modes(w, ms, axes=(0, 1)), axes=(0, 1)).numpy()
    assert np.abs(back - v).max() < 1e-10


def test_conjugate_symmetry():
    ms = ModeSet.for_grid((16, 16), (3, 3))
    rng = np.random.default_rng(5)
    r = ComplexTensor.from_numpy(rng.normal(size=(len(ms), 2, 2)) + 1j * rng.normal(size=(len(ms), 2, 2)))
    sym = enforce_conjugate_symmetry(r, ms)
    position, paired = ms.negation
    values = sym.numpy()
    assert np.allclose(values[position[paired]], np.conj(values[paired]), atol=0)
    assert values[0].imag.max() == 0.0 and values[0].imag.min() == 0.0
    assert np.allclose(enforce_conjugate_symmetry(sym, ms).numpy(), values, atol=1e-15)

    field = rng.normal(size=(16, 16))
    w = truncate_modes(fft(Tensor(field), axes=(0, 1)), ms, axes=(0, 1)).numpy().reshape(-1)
    mixed = ComplexTensor.from_numpy((values[:, 0, 0] * w).reshape(ms.block_shape))
    out = ifft(pad_modes(mixed, ms, axes=(0, 1)), axes=(0, 1)).numpy()
    assert np.abs(out.imag).max() < 1e-10


def _grid(s):
    return Grid.uniform(s, dims=2, periodic=True)


def test_spectrum_of_single_mode():
    grid = _grid(32)
    x = grid.coordinates()
    profile = spectrum(FieldSample(grid, np.sin(2 * np.pi * (x[..., 0] + x[..., 1]))))
    assert list(profile.nonzero_bins()) == [2]
    assert np.all(np.diff(profile.wavenumbers) == 1) and profile.wavenumbers[0] == 0


def test_spectrum_of_zero_field():
    profile = spectrum(np.zeros((16, 16)))
    assert np.array_equal(profile.magnitude, np.zeros_like(profile.magnitude))


def test_white_noise_spectrum_is_flat():
    rng = np.random.default_rng(6)
    profiles = [spectrum(rng.normal(size=(32, 32))) for _ in range(100)]
    mean = profiles[0]
    mean.magnitude = np.mean([p.magnitude for p in profiles], axis=0)
    assert abs(mean.fit_slope(kmin=1)) < 0.2


def test_spectrum_rejects_non_square_grid():
    with pytest.raises(ConfigurationError):
        spectrum(np.zeros((16, 12)))


def test_spectrum_text_export(tmp_path):
    path = spectrum(np.ones((8, 8)), label="ones").save(tmp_path / "s.txt")
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# wavenumber magnitude")
    assert lines[1].split()[0] == "0" and float(lines[1].split()[1]) == pytest.approx(1.0)
