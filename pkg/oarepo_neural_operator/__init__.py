#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Neural operators for parametric PDEs: solvers, models, training and inversion."""

from __future__ import annotations

__version__ = "0.1.0"
