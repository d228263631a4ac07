#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Error reports exported as CSV and aligned-column text."""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import logging
from pathlib import Path
from typing import Any

from oarepo_neural_operator.errors import ConfigurationError

logger = logging.getLogger(__name__)

REPORT_CSV = "report.csv"
REPORT_TEXT = "report.txt"


def config_fingerprint(config: dict[str, Any]) -> str:
    """Short stable hash of a configuration dictionary."""
    encoded = json.dumps(config, sort_keys=True, default=str).encode("utf-8")
    return hashlib.sha256(encoded).hexdigest()[:16]


@dataclasses.dataclass(frozen=True)
class ErrorEntry:
    """Mean relative L2 error over ``samples`` test functions at one resolution."""

    resolution: int
    error: float
    samples: int
    label: str = ""

    def __post_init__(self) -> None:
        """Errors are nonnegative."""
        if not self.error >= 0:
            raise ConfigurationError(f"Error estimate must be nonnegative, got {self.error}")


@dataclasses.dataclass
class ErrorReport:
    """Entries kept sorted by resolution."""

    entries: list[ErrorEntry] = dataclasses.field(default_factory=list)
    fingerprint: str = ""

    def __post_init__(self) -> None:
        """Sort initial entries."""
        self.entries.sort(key=lambda e: e.resolution)

    def add(self, entry: ErrorEntry) -> None:
        """Insert keeping resolutions ascending."""
        self.entries.append(entry)
        self.entries.sort(key=lambda e: e.resolution)

    @property
    def errors(self) -> list[float]:
        """Errors in resolution order."""
        return [e.error for e in self.entries]

    @property
    def resolutions(self) -> list[int]:
        """Resolutions in ascending order."""
        return [e.resolution for e in self.entries]

    def spread(self) -> float:
        """Ratio of the largest to the smallest error."""
        errors = self.errors
        return max(errors) / min(errors) if errors and min(errors) > 0 else float("inf")

    def to_text(self) -> str:
        """Aligned table: one row per resolution, like the published result tables."""
        header = ("resolution", "rel_l2", "samples", "label")
        rows = [(str(e.resolution), f"{e.error:.4f}", str(e.samples), e.label) for e in self.entries]
        widths = [max(len(r[i]) for r in [header, *rows]) for i in range(len(header))]
        lines = [
            "  ".join(cell.ljust(w) for cell, w in zip(row, widths, strict=True)).rstrip() for row in [header, *rows]
        ]
        if self.fingerprint:
            lines.insert(0, f"# config {self.fingerprint}")
        return "\n".join(lines) + "\n"

    def save(self, directory: str | Path) -> Path:
        """Write ``report.csv`` and ``report.txt`` into ``directory``."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        with (directory / REPORT_CSV).open("w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(["resolution", "rel_l2", "samples", "label", "fingerprint"])
            for e in self.entries:
                writer.writerow([e.resolution, repr(e.error), e.samples, e.label, self.fingerprint])
        (directory / REPORT_TEXT).write_text(self.to_text(), encoding="utf-8")
        logger.info("Report with %d entries written to %s", len(self.entries), directory)
        return directory
