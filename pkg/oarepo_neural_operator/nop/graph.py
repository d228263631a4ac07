#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Radius graphs over point clouds, single and multi-level."""

from __future__ import annotations

import dataclasses
import functools
import logging
from typing import TYPE_CHECKING

import numpy as np
from scipy.spatial import cKDTree

from oarepo_neural_operator.errors import ConfigurationError

if TYPE_CHECKING:
    from collections.abc import Sequence

    from oarepo_neural_operator.random_fields import Rng

logger = logging.getLogger(__name__)


@dataclasses.dataclass
class Graph:
    """Directed edges ``src -> dst`` between two node sets with edge features.

    For a ball graph both node sets are the same. Edge features are
    ``(x, y, a(x), a(y))`` with ``x`` the destination and ``y`` the source.
    """

    src: np.ndarray
    dst: np.ndarray
    edge_features: np.ndarray
    num_src: int
    num_dst: int

    def __post_init__(self) -> None:
        """Validate edge endpoints."""
        self.src = np.asarray(self.src, dtype=np.intp)
        self.dst = np.asarray(self.dst, dtype=np.intp)
        if self.src.shape != self.dst.shape or self.edge_features.shape[0] != self.src.shape[0]:
            raise ConfigurationError("Graph edge arrays have inconsistent lengths")
        if self.src.size and (self.src.max() >= self.num_src or self.dst.max() >= self.num_dst):
            raise ConfigurationError("Graph edge endpoint out of range")
        if self.src.size and (self.src.min() < 0 or self.dst.min() < 0):
            raise ConfigurationError("Graph edge endpoint out of range")

    @property
    def num_edges(self) -> int:
        """Number of directed edges."""
        return int(self.src.shape[0])

    @functools.cached_property
    def degree(self) -> np.ndarray:
        """In-degree ``|N(x)|`` of every destination node."""
        return np.bincount(self.dst, minlength=self.num_dst).astype(np.float64)

    def neighbors(self, node: int) -> np.ndarray:
        """Sources of edges ending in ``node``."""
        return np.sort(self.src[self.dst == node])


def edge_features(
    dst_points: np.ndarray, src_points: np.ndarray, dst_values: np.ndarray, src_values: np.ndarray,
    src: np.ndarray, dst: np.ndarray,
) -> np.ndarray:
    """Stack ``(x, y, a(x), a(y))`` per edge."""
    return np.concatenate([dst_points[dst], src_points[src], dst_values[dst], src_values[src]], axis=1)


def radius_edges(
    dst_points: np.ndarray, src_points: np.ndarray, radius: float
) -> tuple[np.ndarray, np.ndarray, int]:
    """Edges from every source within ``radius`` of each destination.

    A destination without any source in range is connected to its nearest
    source. Returns ``(src, dst, number_of_fallbacks)``.
    """
    if radius <= 0:
        raise ConfigurationError(f"Graph radius must be positive, got {radius}", key="radius")
    tree = cKDTree(src_points)
    lists = tree.query_ball_point(dst_points, r=radius)
    fallbacks = 0
    src, dst = [], []
    for i, neighbors in enumerate(lists):
        if not neighbors:
            _, nearest = tree.query(dst_points[i])
            neighbors = [int(nearest)]
            fallbacks += 1
        neighbors = sorted(neighbors)
        src.extend(neighbors)
        dst.extend([i] * len(neighbors))
    return np.asarray(src, dtype=np.intp), np.asarray(dst, dtype=np.intp), fallbacks


def _as_2d(values: np.ndarray, n: int) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    return values.reshape(n, -1)


def build_ball_graph(
    points: np.ndarray,
    values: np.ndarray,
    radius: float,
    subsample: int | None = None,
    rng: Rng | None = None,
    node_index: np.ndarray | None = None,
) -> tuple[Graph, np.ndarray]:
    """Ball graph on ``subsample`` uniformly chosen points.

    :param points: all grid points, shape ``(J, d)``
    :param values: input function values at the points, shape ``(J, d_a)``
    :param radius: neighbourhood radius ``r``
    :param subsample: number of nodes ``J'`` (all points when ``None``)
    :param node_index: explicit node selection, overriding ``subsample``
    :return: the graph and the indices of its nodes among ``points``
    """
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    values = _as_2d(values, n)
    if node_index is None:
        if subsample is None or subsample >= n:
            node_index = np.arange(n)
        else:
            if subsample < 1:
                raise ConfigurationError(f"Graph subsample must be at least 1, got {subsample}", key="subsample")
            if rng is None:
                raise ConfigurationError("Random subsampling needs an Rng")
            node_index = np.sort(rng.choice(n, subsample))
    node_index = np.asarray(node_index, dtype=np.intp)
    nodes, node_values = points[node_index], values[node_index]
    src, dst, fallbacks = radius_edges(nodes, nodes, radius)
    if fallbacks:
        logger.warning("%d isolated graph nodes received a self-edge", fallbacks)
    features = edge_features(nodes, nodes, node_values, node_values, src, dst)
    return Graph(src, dst, features, len(nodes), len(nodes)), node_index


def build_bipartite_graph(
    dst_points: np.ndarray,
    src_points: np.ndarray,
    dst_values: np.ndarray,
    src_values: np.ndarray,
    radius: float,
) -> Graph:
    """Edges from a source node set to a destination node set within ``radius``."""
    src, dst, fallbacks = radius_edges(dst_points, src_points, radius)
    if fallbacks:
        logger.debug("%d destination nodes fell back to their nearest source", fallbacks)
    features = edge_features(dst_points, src_points, dst_values, src_values, src, dst)
    return Graph(src, dst, features, len(src_points), len(dst_points))


def partition_nodes(n: int, group_size: int, rng: Rng) -> list[np.ndarray]:
    """Random disjoint partition of ``range(n)`` into groups of about ``group_size``."""
    if group_size < 1:
        raise ConfigurationError(f"Group size must be positive, got {group_size}", key="subsample")
    order = rng.permutation(n)
    groups = max(1, int(round(n / group_size)))
    return [np.sort(part) for part in np.array_split(order, groups)]


@dataclasses.dataclass
class MultiLevelGraph:
    """Nested node levels ``J_1 >= ... >= J_L`` with intra- and inter-level graphs.

    ``levels[l]`` indexes level ``l`` nodes among level-0 nodes; ``intra[l]``
    connects level ``l`` to itself, ``down[l]`` goes from level ``l`` to
    ``l + 1`` and ``up[l]`` from level ``l + 1`` back to ``l``.
    """

    node_index: np.ndarray
    levels: list[np.ndarray]
    intra: list[Graph]
    down: list[Graph]
    up: list[Graph]

    def __post_init__(self) -> None:
        """Validate level sizes."""
        sizes = [len(level) for level in self.levels]
        if any(b > a for a, b in zip(sizes[:-1], sizes[1:], strict=True)):
            raise ConfigurationError(f"Level node counts must be nonincreasing, got {sizes}", key="levels")
        if len(self.intra) != len(sizes) or len(self.down) != len(sizes) - 1 or len(self.up) != len(sizes) - 1:
            raise ConfigurationError("Multi-level graph has inconsistent transition counts", key="levels")
        for l, graph in enumerate(self.intra):
            if graph.num_src != sizes[l] or graph.num_dst != sizes[l]:
                raise ConfigurationError(f"Level {l} graph does not match its {sizes[l]} nodes", key="levels")

    @property
    def num_levels(self) -> int:
        """Number of levels ``L``."""
        return len(self.levels)


def build_multilevel_graph(
    points: np.ndarray,
    values: np.ndarray,
    level_sizes: Sequence[int],
    radii: Sequence[float],
    rng: Rng,
    node_index: np.ndarray | None = None,
) -> MultiLevelGraph:
    """Random nested construction: level ``l + 1`` is a random subset of level ``l``.

    Inter-level edges use the radius of the finer level.
    """
    points = np.asarray(points, dtype=np.float64)
    values = _as_2d(values, points.shape[0])
    if len(level_sizes) != len(radii) or not level_sizes:
        raise ConfigurationError("Need one radius per level", key="radii")
    if any(b > a for a, b in zip(level_sizes[:-1], level_sizes[1:], strict=True)):
        raise ConfigurationError(f"Level node counts must be nonincreasing, got {list(level_sizes)}", key="levels")
    if node_index is None:
        n = min(level_sizes[0], points.shape[0])
        node_index = np.sort(rng.choice(points.shape[0], n)) if n < points.shape[0] else np.arange(n)
    node_index = np.asarray(node_index, dtype=np.intp)
    base_points, base_values = points[node_index], values[node_index]

    levels = [np.arange(len(node_index))]
    for size in level_sizes[1:]:
        parent = levels[-1]
        keep = np.sort(rng.choice(len(parent), min(size, len(parent))))
        levels.append(parent[keep])
    return _assemble_levels(node_index, base_points, base_values, levels, radii)


def build_orthogonal_multilevel_graph(
    grid_sizes: Sequence[int],
    points: np.ndarray,
    values: np.ndarray,
    num_levels: int,
    radii: Sequence[float],
) -> MultiLevelGraph:
    """Level ``l`` is the stride-``2**l`` subgrid of a uniform grid."""
    if len(radii) != num_levels:
        raise ConfigurationError("Need one radius per level", key="radii")
    points = np.asarray(points, dtype=np.float64)
    values = _as_2d(values, points.shape[0])
    flat = np.arange(points.shape[0]).reshape(tuple(grid_sizes))
    levels = []
    for l in range(num_levels):
        stride = 2**l
        sub = flat[tuple(slice(None, None, stride) for _ in grid_sizes)].ravel()
        if sub.size == 0:
            raise ConfigurationError(f"Grid {tuple(grid_sizes)} too small for {num_levels} levels", key="levels")
        levels.append(np.sort(sub))
    return _assemble_levels(np.arange(points.shape[0]), points, values, levels, radii)


def _assemble_levels(
    node_index: np.ndarray,
    points: np.ndarray,
    values: np.ndarray,
    levels: list[np.ndarray],
    radii: Sequence[float],
) -> MultiLevelGraph:
    intra, down, up = [], [], []
    for l, level in enumerate(levels):
        p, v = points[level], values[level]
        src, dst, fallbacks = radius_edges(p, p, radii[l])
        if fallbacks:
            logger.warning("%d isolated nodes on level %d received a self-edge", fallbacks, l)
        intra.append(Graph(src, dst, edge_features(p, p, v, v, src, dst), len(level), len(level)))
    for l in range(len(levels) - 1):
        fine, coarse = levels[l], levels[l + 1]
        down.append(build_bipartite_graph(points[coarse], points[fine], values[coarse], values[fine], radii[l]))
        up.append(build_bipartite_graph(points[fine], points[coarse], values[fine], values[coarse], radii[l]))
    return MultiLevelGraph(node_index, levels, intra, down, up)
