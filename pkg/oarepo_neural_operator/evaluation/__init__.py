#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Error estimation, resolution studies, robustness protocol and spectra."""

from __future__ import annotations

from oarepo_neural_operator.evaluation.report import ErrorEntry, ErrorReport, config_fingerprint
from oarepo_neural_operator.evaluation.spectra import (
    SpectraComparison,
    compare_spectra,
    compare_trajectory_spectra,
    default_band,
)
from oarepo_neural_operator.evaluation.studies import (
    RobustnessResult,
    evaluate,
    noisy_copy,
    resolution_sweep,
    robustness_study,
    superresolution,
)

__all__ = [
    "ErrorEntry",
    "ErrorReport",
    "RobustnessResult",
    "SpectraComparison",
    "compare_spectra",
    "compare_trajectory_spectra",
    "config_fingerprint",
    "default_band",
    "evaluate",
    "noisy_copy",
    "resolution_sweep",
    "robustness_study",
    "superresolution",
]
