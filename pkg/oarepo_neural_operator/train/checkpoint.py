#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Model checkpoints: manifest with hyperparameters plus one raw parameter block."""

from __future__ import annotations

import dataclasses
import logging
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np

from oarepo_neural_operator.artifacts import content_hash, read_block, read_manifest, write_block, write_manifest
from oarepo_neural_operator.nop.models import build_model
from oarepo_neural_operator.train.normalizer import NormalizedModel, UnitGaussianNormalizer

if TYPE_CHECKING:
    from oarepo_neural_operator.nop.models import OperatorModel

logger = logging.getLogger(__name__)

CHECKPOINT_KIND = "checkpoint"
PARAMETERS_NAME = "parameters.bin"


@dataclasses.dataclass
class Checkpoint:
    """A model restored from disk with the metadata it was saved with."""

    model: OperatorModel
    path: Path
    epoch: int | None
    manifest: dict[str, Any]


def save_checkpoint(
    directory: str | Path,
    model: OperatorModel,
    epoch: int | None = None,
    metadata: dict[str, Any] | None = None,
) -> Path:
    """Write ``model`` to ``directory`` and return the directory."""
    directory = Path(directory)
    inner = model.model if isinstance(model, NormalizedModel) else model
    named = inner.named_parameters()
    flat = np.concatenate([p.data.ravel() for _, p in named]) if named else np.zeros(0)
    write_block(directory / PARAMETERS_NAME, flat)
    write_manifest(
        directory,
        CHECKPOINT_KIND,
        {
            "model": inner.config(),
            "normalizer": model.normalizers() if isinstance(model, NormalizedModel) else None,
            "parameters": [{"name": name, "shape": list(p.shape)} for name, p in named],
            "num_parameters": int(flat.size),
            "epoch": epoch,
            "content_hash": content_hash([directory / PARAMETERS_NAME]),
            **(metadata or {}),
        },
    )
    logger.info("Checkpoint written to %s", directory)
    return directory


def load_checkpoint(directory: str | Path) -> Checkpoint:
    """Rebuild the model stored in ``directory``.

    :raises FileNotFoundError: if the checkpoint does not exist
    :raises ContractError: if stored parameters do not fit the rebuilt model
    """
    directory = Path(directory)
    manifest = read_manifest(directory, kind=CHECKPOINT_KIND)
    model = build_model(manifest["model"])
    flat = read_block(directory / PARAMETERS_NAME, (manifest["num_parameters"],))
    state, offset = {}, 0
    for entry in manifest["parameters"]:
        size = int(np.prod(entry["shape"]))
        state[entry["name"]] = flat[offset : offset + size].reshape(entry["shape"])
        offset += size
    model.load_state_dict(state)
    if manifest.get("normalizer"):
        model = NormalizedModel(
            model,
            UnitGaussianNormalizer.from_dict(manifest["normalizer"]["input"]),
            UnitGaussianNormalizer.from_dict(manifest["normalizer"]["output"]),
        )
    return Checkpoint(model, directory, manifest.get("epoch"), manifest)
