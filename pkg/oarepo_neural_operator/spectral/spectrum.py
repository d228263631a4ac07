#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Radially binned energy spectra of 2-D periodic fields."""

from __future__ import annotations

import dataclasses
import logging
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np

from oarepo_neural_operator.errors import ConfigurationError

if TYPE_CHECKING:
    from oarepo_neural_operator.grid import FieldSample

logger = logging.getLogger(__name__)


@dataclasses.dataclass
class SpectrumProfile:
    """Mean modal magnitude per wavenumber bin ``|k| = |k1| + |k2|``."""

    wavenumbers: np.ndarray
    magnitude: np.ndarray
    label: str = ""

    def nonzero_bins(self, tol: float = 1e-12) -> np.ndarray:
        """Wavenumbers whose magnitude exceeds ``tol``."""
        return self.wavenumbers[self.magnitude > tol]

    def fit_slope(self, kmin: int = 1, kmax: int | None = None) -> float:
        """Least-squares slope of ``log magnitude`` against ``log |k|`` over a band.

        Bins with zero magnitude are skipped.
        """
        k = self.wavenumbers
        mask = (k >= max(kmin, 1)) & (self.magnitude > 0)
        if kmax is not None:
            mask &= k <= kmax
        if mask.sum() < 2:
            raise ConfigurationError(f"Not enough nonzero spectrum bins in [{kmin}, {kmax}] to fit a slope")
        slope, _ = np.polyfit(np.log(k[mask]), np.log(self.magnitude[mask]), 1)
        return float(slope)

    def to_text(self) -> str:
        """Two-column text: wavenumber and magnitude."""
        lines = [f"# wavenumber magnitude{(' ' + self.label) if self.label else ''}"]
        lines += [f"{int(k)} {m:.12e}" for k, m in zip(self.wavenumbers, self.magnitude, strict=True)]
        return "\n".join(lines) + "\n"

    def save(self, path: str | Path) -> Path:
        """Write the two-column text export."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_text())
        logger.info("Wrote spectrum with %d bins to %s", len(self.wavenumbers), path)
        return path


def _values(field: FieldSample | Any) -> np.ndarray:
    values = getattr(field, "values", field)
    values = np.asarray(values, dtype=np.float64)
    if values.ndim == 3 and values.shape[-1] == 1:
        values = values[..., 0]
    return values


def spectrum(field: FieldSample | Any, label: str = "") -> SpectrumProfile:
    """Compute the spectrum of a 2-D periodic field sampled on a square grid.

    Coefficients are normalised by the number of grid points, so a unit-amplitude
    sine contributes 1/2 to each of its two conjugate modes.
    """
    values = _values(field)
    if values.ndim != 2:
        raise ConfigurationError(f"Spectrum needs a 2-D field, got shape {values.shape}")
    if values.shape[0] != values.shape[1]:
        raise ConfigurationError(f"Spectrum needs a square grid, got {values.shape[0]}x{values.shape[1]}")
    s = values.shape[0]
    coeffs = np.abs(np.fft.fft2(values)) / (s * s)
    freq = np.rint(np.fft.fftfreq(s, d=1.0 / s)).astype(int)
    radius = np.abs(freq)[:, None] + np.abs(freq)[None, :]
    counts = np.bincount(radius.ravel())
    totals = np.bincount(radius.ravel(), weights=coeffs.ravel())
    wavenumbers = np.arange(len(counts))
    magnitude = np.where(counts > 0, totals / np.maximum(counts, 1), 0.0)
    return SpectrumProfile(wavenumbers=wavenumbers, magnitude=magnitude, label=label)
