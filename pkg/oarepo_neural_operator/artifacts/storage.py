#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Manifest + raw binary block storage.

Every artifact directory holds a UTF-8 ``manifest.json`` with explicit shapes
and a ``format_version`` field, next to raw little-endian float64 row-major
``.bin`` blocks.
"""

from __future__ import annotations

import hashlib
import json
import logging
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np

from oarepo_neural_operator.errors import ConfigurationError

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
MANIFEST_NAME = "manifest.json"
BLOCK_DTYPE = np.dtype("<f8")


def write_manifest(directory: str | Path, kind: str, data: dict[str, Any]) -> Path:
    """Write ``manifest.json`` tagged with the artifact kind and format version."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    manifest = {"format_version": FORMAT_VERSION, "kind": kind, **data}
    path = directory / MANIFEST_NAME
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def read_manifest(directory: str | Path, kind: str | None = None) -> dict[str, Any]:
    """Read and validate a manifest.

    :raises FileNotFoundError: if the directory or manifest does not exist
    :raises ConfigurationError: on a different format version or kind
    """
    path = Path(directory) / MANIFEST_NAME
    if not path.exists():
        raise FileNotFoundError(f"Manifest not found: {path}")
    try:
        manifest = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"Invalid JSON in manifest {path}: {e}") from e
    version = manifest.get("format_version")
    if version != FORMAT_VERSION:
        raise ConfigurationError(
            f"Unsupported format version {version} in {path}, expected {FORMAT_VERSION}", key="format_version"
        )
    if kind is not None and manifest.get("kind") != kind:
        raise ConfigurationError(f"Expected a {kind} artifact in {directory}, found {manifest.get('kind')!r}")
    return manifest


def write_block(path: str | Path, array: Any) -> tuple[int, ...]:
    """Write an array as raw little-endian float64; return its shape."""
    array = np.ascontiguousarray(array, dtype=BLOCK_DTYPE)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    array.tofile(path)
    return tuple(array.shape)


def read_block(path: str | Path, shape: Sequence[int]) -> np.ndarray:
    """Read a raw block and reshape it."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Binary block not found: {path}")
    data = np.fromfile(path, dtype=BLOCK_DTYPE)
    expected = int(np.prod(shape))
    if data.size != expected:
        raise ConfigurationError(
            f"Block {path} holds {data.size} values, manifest shape {tuple(shape)} needs {expected}"
        )
    return data.reshape(tuple(shape)).astype(np.float64)


def content_hash(paths: Iterable[str | Path]) -> str:
    """SHA-256 over file contents in the given order."""
    digest = hashlib.sha256()
    for path in paths:
        with Path(path).open("rb") as f:
            for chunk in iter(lambda: f.read(1 << 20), b""):
                digest.update(chunk)
    return digest.hexdigest()
