#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""On-disk artifacts passed between pipeline steps."""

from __future__ import annotations

from oarepo_neural_operator.artifacts.base import PipelineData
from oarepo_neural_operator.artifacts.storage import (
    FORMAT_VERSION,
    content_hash,
    read_block,
    read_manifest,
    write_block,
    write_manifest,
)

__all__ = (
    "FORMAT_VERSION",
    "PipelineData",
    "content_hash",
    "read_block",
    "read_manifest",
    "write_block",
    "write_manifest",
)
