#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Spectral comparison of predicted and true vorticity snapshots."""

from __future__ import annotations

import dataclasses
import math
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np

from oarepo_neural_operator.errors import ConfigurationError
from oarepo_neural_operator.spectral import SpectrumProfile, spectrum

if TYPE_CHECKING:
    from oarepo_neural_operator.grid import FieldSample


def default_band(resolution: int) -> tuple[int, int]:
    """Slope band ``[4, s/6]``."""
    return 4, max(5, resolution // 6)


def _slope(profile: SpectrumProfile, band: tuple[int, int]) -> float:
    k = profile.nonzero_bins()
    if np.count_nonzero((k >= band[0]) & (k <= band[1])) < 2:
        return math.nan
    return profile.fit_slope(*band)


@dataclasses.dataclass(frozen=True)
class SpectraComparison:
    """Spectra of a predicted and a true snapshot with fitted slopes."""

    predicted: SpectrumProfile
    truth: SpectrumProfile
    band: tuple[int, int]
    predicted_slope: float
    truth_slope: float

    def save(self, directory: str | Path, stem: str) -> list[Path]:
        """Two-column text files ``<stem>_pred.txt`` and ``<stem>_true.txt``."""
        directory = Path(directory)
        return [
            self.predicted.save(directory / f"{stem}_pred.txt"),
            self.truth.save(directory / f"{stem}_true.txt"),
        ]


def compare_spectra(
    predicted: FieldSample | Any, truth: FieldSample | Any, band: tuple[int, int] | None = None
) -> SpectraComparison:
    """Spectra of two scalar 2-D snapshots on the same grid.

    A slope is ``nan`` when fewer than two nonzero bins fall in the band.
    """
    pred_profile = spectrum(predicted, label="predicted")
    true_profile = spectrum(truth, label="truth")
    if len(pred_profile.wavenumbers) != len(true_profile.wavenumbers):
        raise ConfigurationError("Predicted and true snapshots live on different grids")
    band = band or default_band(int(np.asarray(getattr(truth, "values", truth)).shape[0]))
    return SpectraComparison(pred_profile, true_profile, band, _slope(pred_profile, band), _slope(true_profile, band))


def compare_trajectory_spectra(
    predicted: FieldSample, truth: FieldSample, band: tuple[int, int] | None = None
) -> list[SpectraComparison]:
    """One comparison per snapshot stored along the channel axis."""
    if predicted.values.shape != truth.values.shape:
        raise ConfigurationError(
            f"Trajectories differ in shape: {predicted.values.shape} and {truth.values.shape}"
        )
    return [
        compare_spectra(predicted.values[..., t], truth.values[..., t], band) for t in range(truth.channels)
    ]
