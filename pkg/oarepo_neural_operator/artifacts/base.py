#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Data structure describing an artifact produced by a pipeline step.

A step receives the artifacts produced by the previous steps and may pick the
ones it needs by ``kind`` (``dataset``, ``checkpoint``, ``report``,
``spectrum``, ``chain``).
"""

from __future__ import annotations

import dataclasses
from pathlib import Path


@dataclasses.dataclass
class PipelineData:
    """Artifact on disk.

    Contains the path of the artifact (a directory or a file) and a metadata
    dictionary with information like kind, problem or resolution.
    """

    path: Path
    metadata: dict = dataclasses.field(default_factory=dict)

    @property
    def kind(self) -> str:
        """Artifact kind stored in the metadata."""
        return str(self.metadata.get("kind", ""))
