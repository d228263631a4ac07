#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Retained Fourier mode sets ("corners") and operations on mode blocks."""

from __future__ import annotations

import dataclasses
import functools
from typing import TYPE_CHECKING

import numpy as np

from oarepo_neural_operator.errors import ConfigurationError
from oarepo_neural_operator.tensor import ComplexTensor

if TYPE_CHECKING:
    from collections.abc import Sequence


@dataclasses.dataclass(frozen=True)
class ModeSet:
    """Low/high frequency corners kept by a truncated spectral layer.

    Along axis ``j`` the indices ``0 .. kmax_j - 1`` and ``s_j - kmax_j .. s_j - 1``
    are retained, so the set holds ``prod(2 * kmax_j)`` multi-indices ordered
    row-major over the per-axis lists.
    """

    sizes: tuple[int, ...]
    kmax: tuple[int, ...]

    def __post_init__(self) -> None:
        """Validate cutoffs against grid sizes."""
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        object.__setattr__(self, "kmax", tuple(int(k) for k in self.kmax))
        if len(self.sizes) != len(self.kmax):
            raise ConfigurationError(
                f"ModeSet needs one cutoff per axis, got sizes {self.sizes} and kmax {self.kmax}", key="kmax"
            )
        for size, k in zip(self.sizes, self.kmax, strict=True):
            if k < 1:
                raise ConfigurationError(f"Mode cutoff must be positive, got {k}", key="kmax")
            if 2 * k >= size:
                raise ConfigurationError(
                    f"Mode cutoff {k} is not below half the grid size {size}; modes would double-count",
                    key="kmax",
                )

    @classmethod
    def for_grid(cls, sizes: Sequence[int], kmax: int | Sequence[int]) -> ModeSet:
        """Build a mode set, broadcasting a scalar cutoff to every axis."""
        if isinstance(kmax, int):
            kmax = (kmax,) * len(sizes)
        return cls(tuple(sizes), tuple(kmax))

    @property
    def dims(self) -> int:
        """Number of axes."""
        return len(self.sizes)

    @property
    def block_shape(self) -> tuple[int, ...]:
        """Per-axis extent of the compact mode block."""
        return tuple(2 * k for k in self.kmax)

    def __len__(self) -> int:
        """Number of retained multi-indices."""
        return int(np.prod(self.block_shape))

    def axis_indices(self, axis: int) -> np.ndarray:
        """Retained DFT indices along one axis."""
        size, k = self.sizes[axis], self.kmax[axis]
        return np.concatenate([np.arange(k), np.arange(size - k, size)])

    @property
    def indices(self) -> list[tuple[int, ...]]:
        """Ordered list of retained multi-indices."""
        grids = np.meshgrid(*(self.axis_indices(j) for j in range(self.dims)), indexing="ij")
        return [tuple(int(g) for g in row) for row in np.stack([g.reshape(-1) for g in grids], axis=1)]

    def with_sizes(self, sizes: Sequence[int]) -> ModeSet:
        """Same cutoffs on a different grid."""
        return ModeSet(tuple(sizes), self.kmax)

    @functools.cached_property
    def negation(self) -> tuple[np.ndarray, np.ndarray]:
        """Position of ``-k mod s`` for every retained mode and a paired mask.

        Modes whose negation falls outside the set (frequency ``-kmax_j`` on
        some axis) are unpaired; their position maps to themselves.
        """
        per_axis_pos = []
        per_axis_ok = []
        for j in range(self.dims):
            idx = self.axis_indices(j)
            lookup = {int(v): p for p, v in enumerate(idx)}
            neg = [lookup.get(int((-v) % self.sizes[j]), -1) for v in idx]
            per_axis_pos.append(np.array([p if p >= 0 else i for i, p in enumerate(neg)]))
            per_axis_ok.append(np.array([p >= 0 for p in neg]))
        pos_grids = np.meshgrid(*per_axis_pos, indexing="ij")
        ok_grids = np.meshgrid(*per_axis_ok, indexing="ij")
        position = np.ravel_multi_index(tuple(g.reshape(-1) for g in pos_grids), self.block_shape)
        paired = np.logical_and.reduce([g.reshape(-1) for g in ok_grids])
        return position, paired


def _check_axes(w: ComplexTensor, ms: ModeSet, axes: Sequence[int], expected: Sequence[int]) -> None:
    if len(axes) != ms.dims:
        raise ConfigurationError(f"ModeSet has {ms.dims} axes but {len(axes)} transform axes were given")
    for axis, size in zip(axes, expected, strict=True):
        if w.shape[axis] != size:
            raise ConfigurationError(
                f"Grid/ModeSet mismatch on axis {axis}: array has {w.shape[axis]} points, mode set expects {size}"
            )


def truncate_modes(w: ComplexTensor, ms: ModeSet, axes: Sequence[int]) -> ComplexTensor:
    """Keep only the retained corners of a spectrum along ``axes``."""
    _check_axes(w, ms, axes, ms.sizes)
    for j, axis in enumerate(axes):
        w = w.gather(ms.axis_indices(j), axis=axis)
    return w


def pad_modes(block: ComplexTensor, ms: ModeSet, axes: Sequence[int]) -> ComplexTensor:
    """Zero-fill the complement of the retained corners (inverse of truncation)."""
    _check_axes(block, ms, axes, ms.block_shape)
    for j, axis in enumerate(axes):
        block = block.scatter_add(ms.axis_indices(j), ms.sizes[j], axis=axis)
    return block


def enforce_conjugate_symmetry(r: ComplexTensor, ms: ModeSet, mode_axis: int = 0) -> ComplexTensor:
    """Project a flattened mode block onto ``R(-k) = conj(R(k))``.

    Self-conjugate modes become real and unpaired modes are zeroed, so the
    operator maps real fields to real fields exactly.
    """
    if r.shape[mode_axis] != len(ms):
        raise ConfigurationError(f"Mode block has {r.shape[mode_axis]} modes, mode set holds {len(ms)}")
    position, paired = ms.negation
    mirrored = r.gather(position, axis=mode_axis).conj()
    shape = [1] * r.ndim
    shape[mode_axis] = len(ms)
    weight = (0.5 * paired.astype(np.float64)).reshape(shape)
    return (r + mirrored).scale(weight)
