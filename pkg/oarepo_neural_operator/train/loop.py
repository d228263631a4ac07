#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Mini-batch training loop with the step-halving Adam schedule."""

from __future__ import annotations

import csv
import dataclasses
import logging
import math
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np
from tqdm import tqdm

from oarepo_neural_operator.config import HISTORY_NAME
from oarepo_neural_operator.errors import ConfigurationError, NumericalError
from oarepo_neural_operator.random_fields import Rng
from oarepo_neural_operator.tensor import get_tape
from oarepo_neural_operator.train.checkpoint import save_checkpoint
from oarepo_neural_operator.train.losses import LOSSES, dataset_errors, get_loss, relative_l2_values
from oarepo_neural_operator.train.normalizer import NormalizedModel
from oarepo_neural_operator.train.optim import AdamState, adam_step, learning_rate

if TYPE_CHECKING:
    from oarepo_neural_operator.nop.models import OperatorModel
    from oarepo_neural_operator.pde.dataset import Dataset

logger = logging.getLogger(__name__)

CHECKPOINT_DIR = "checkpoint"


@dataclasses.dataclass
class TrainConfig:
    """Training hyperparameters; variant hyperparameters live in the model section."""

    epochs: int = 500
    initial_lr: float = 1e-3
    halve_every: int = 100
    batch_size: int = 20
    loss: str = "relative_l2"
    weight_decay: float = 0.0
    patience: int | None = None
    checkpoint_every: int = 0
    normalize: bool = False
    seed: int = 0
    log_every: int = 10
    progress: bool = False

    def __post_init__(self) -> None:
        """Validate ranges."""
        if self.epochs < 0:
            raise ConfigurationError(f"epochs must be nonnegative, got {self.epochs}", key="train.epochs")
        if not self.initial_lr > 0:
            raise ConfigurationError(f"initial_lr must be positive, got {self.initial_lr}", key="train.initial_lr")
        if self.batch_size < 1:
            raise ConfigurationError(f"batch_size must be positive, got {self.batch_size}", key="train.batch_size")
        if self.halve_every < 1:
            raise ConfigurationError(f"halve_every must be positive, got {self.halve_every}", key="train.halve_every")
        if self.loss not in LOSSES:
            raise ConfigurationError(f"Unknown loss '{self.loss}'", key="train.loss")
        if self.weight_decay < 0:
            raise ConfigurationError("weight_decay must be nonnegative", key="train.weight_decay")
        if self.patience is not None and self.patience < 1:
            raise ConfigurationError("patience must be positive", key="train.patience")

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> TrainConfig:
        """Build from a config section, rejecting unknown keys."""
        known = {f.name for f in dataclasses.fields(cls)}
        for key in data:
            if key not in known:
                raise ConfigurationError(f"Unknown training option '{key}'", key=f"train.{key}")
        return cls(**data)

    def to_dict(self) -> dict[str, Any]:
        """Plain dictionary."""
        return dataclasses.asdict(self)


@dataclasses.dataclass
class HistoryRow:
    """Errors after one epoch."""

    epoch: int
    lr: float
    train_err: float
    test_err: float


@dataclasses.dataclass
class History:
    """Per-epoch training record."""

    rows: list[HistoryRow] = dataclasses.field(default_factory=list)

    def __len__(self) -> int:
        """Number of completed epochs."""
        return len(self.rows)

    def column(self, name: str) -> np.ndarray:
        """One column as an array."""
        return np.array([getattr(row, name) for row in self.rows], dtype=np.float64)

    def save(self, path: str | Path) -> Path:
        """Write ``epoch,lr,train_err,test_err`` CSV."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(["epoch", "lr", "train_err", "test_err"])
            for row in self.rows:
                writer.writerow([row.epoch, repr(row.lr), repr(row.train_err), repr(row.test_err)])
        return path


@dataclasses.dataclass
class TrainResult:
    """Trained model, its history and the final checkpoint (if written)."""

    model: OperatorModel
    history: History
    checkpoint: Path | None = None


def train(
    model: OperatorModel,
    dataset: Dataset,
    cfg: TrainConfig,
    test_dataset: Dataset | None = None,
    output_dir: str | Path | None = None,
    metadata: dict[str, Any] | None = None,
) -> TrainResult:
    """Minimise the configured loss over shuffled mini-batches.

    With ``cfg.normalize`` the model is wrapped in a :class:`NormalizedModel`
    fitted on ``dataset``; the returned model is the wrapper.

    :raises ConfigurationError: on an empty dataset or mismatched grids
    :raises NumericalError: on a non-finite loss or gradient, naming the last checkpoint
    """
    if len(dataset) == 0:
        raise ConfigurationError("Training dataset is empty", key="data.n_train")
    grid = dataset.input_grid
    if dataset.output_grid.sizes != grid.sizes:
        raise ConfigurationError(
            f"Models map between functions on one grid, got {grid.sizes} -> {dataset.output_grid.sizes}"
        )
    inputs, outputs = dataset.input_array(), dataset.output_array()
    if cfg.normalize and not isinstance(model, NormalizedModel):
        model = NormalizedModel.fit(model, inputs, outputs)
    test_arrays = (test_dataset.input_array(), test_dataset.output_array()) if test_dataset else None

    output_dir = Path(output_dir) if output_dir is not None else None
    metadata = {"train": cfg.to_dict(), **(metadata or {})}
    seed_rng = Rng(cfg.seed)
    shuffle_rng, batch_rng = seed_rng.spawn(0), seed_rng.spawn(1)
    loss_fn = get_loss(cfg.loss)
    state = AdamState()
    params = model.named_parameters()
    history = History()
    last_checkpoint: Path | None = None
    best, stale = math.inf, 0
    n = len(inputs)

    for epoch in tqdm(range(cfg.epochs), desc="epochs", disable=not cfg.progress):
        lr = learning_rate(epoch, cfg.initial_lr, cfg.halve_every)
        order = shuffle_rng.permutation(n)
        errors = []
        for start in range(0, n, cfg.batch_size):
            index = order[start : start + cfg.batch_size]
            model.zero_grad()
            pred, truth = model.training_batch(inputs[index], outputs[index], grid, batch_rng)
            loss = loss_fn(pred, truth)
            if not np.isfinite(loss.item()):
                get_tape().reset()
                raise NumericalError(
                    f"Non-finite loss at epoch {epoch}",
                    checkpoint=str(last_checkpoint) if last_checkpoint else None,
                )
            loss.backward()
            try:
                adam_step(params, state, lr, weight_decay=cfg.weight_decay)
            except NumericalError as e:
                e.checkpoint = str(last_checkpoint) if last_checkpoint else None
                raise
            errors.append(relative_l2_values(pred.numpy(), truth))

        train_err = float(np.concatenate(errors).mean())
        test_err = (
            float(dataset_errors(model, *test_arrays, test_dataset.input_grid, cfg.batch_size).mean())
            if test_arrays is not None and len(test_arrays[0])
            else math.nan
        )
        history.rows.append(HistoryRow(epoch, lr, train_err, test_err))
        if cfg.log_every and (epoch + 1) % cfg.log_every == 0:
            logger.info("epoch %d lr %.3e train %.6f test %.6f", epoch, lr, train_err, test_err)

        if output_dir is not None and cfg.checkpoint_every and (epoch + 1) % cfg.checkpoint_every == 0:
            last_checkpoint = save_checkpoint(output_dir / CHECKPOINT_DIR, model, epoch + 1, metadata)

        if cfg.patience is not None and not math.isnan(test_err):
            if test_err < best:
                best, stale = test_err, 0
            else:
                stale += 1
                if stale >= cfg.patience:
                    logger.info("Stopping early after epoch %d, test error did not improve for %d epochs", epoch, stale)
                    break

    if output_dir is not None:
        last_checkpoint = save_checkpoint(output_dir / CHECKPOINT_DIR, model, len(history), metadata)
        history.save(output_dir / HISTORY_NAME)
    return TrainResult(model, history, last_checkpoint)
