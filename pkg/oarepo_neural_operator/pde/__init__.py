#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Reference solvers for the test problems and dataset assembly."""

from oarepo_neural_operator.grid import FieldSample, Grid
from oarepo_neural_operator.pde.burgers import solve_burgers
from oarepo_neural_operator.pde.darcy import assemble_darcy, solve_darcy_fdm
from oarepo_neural_operator.pde.dataset import (
    DEFAULT_SOLVER_PARAMS,
    PROBLEM_MEASURES,
    PROBLEMS,
    Dataset,
    build_dataset,
    resolve_solver_params,
    solve_problem,
)
from oarepo_neural_operator.pde.navier_stokes import VorticityStepper, default_forcing, solve_navier_stokes
from oarepo_neural_operator.pde.poisson import green_function, solve_poisson_green, trapezoid_weights
from oarepo_neural_operator.pde.sampling import downsample

__all__ = (
    "DEFAULT_SOLVER_PARAMS",
    "PROBLEMS",
    "PROBLEM_MEASURES",
    "Dataset",
    "FieldSample",
    "Grid",
    "VorticityStepper",
    "assemble_darcy",
    "build_dataset",
    "default_forcing",
    "downsample",
    "green_function",
    "resolve_solver_params",
    "solve_burgers",
    "solve_darcy_fdm",
    "solve_navier_stokes",
    "solve_poisson_green",
    "solve_problem",
    "trapezoid_weights",
)
