#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Steady Darcy flow ``-div(a grad u) = f`` on the unit square, zero Dirichlet data."""

from __future__ import annotations

import logging

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from oarepo_neural_operator.errors import ConfigurationError, DomainError, SolverError
from oarepo_neural_operator.grid import FieldSample

logger = logging.getLogger(__name__)

RESIDUAL_TOLERANCE = 1e-10
CG_MAX_ITERATIONS = 20000


def _harmonic(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return 2.0 * a * b / (a + b)


def assemble_darcy(a: FieldSample, forcing: float = 1.0) -> tuple[scipy.sparse.csr_matrix, np.ndarray]:
    """Assemble the conservative 5-point system on interior nodes.

    Face coefficients are harmonic means of the two adjacent nodal values.
    Returns the matrix and right-hand side ordered row-major over the
    ``(s - 2) x (s - 2)`` interior.
    """
    grid = a.grid
    if grid.dims != 2 or any(grid.periodic):
        raise ConfigurationError(f"Darcy solver needs a 2-D endpoint grid, got {grid.sizes}")
    coeff = a.scalar()
    if np.any(coeff <= 0):
        raise DomainError(f"Darcy coefficient must be positive, minimum is {coeff.min()}")
    hx, hy = grid.spacing
    nx, ny = grid.sizes[0] - 2, grid.sizes[1] - 2

    ax = _harmonic(coeff[:-1, :], coeff[1:, :])  # faces between i and i+1
    ay = _harmonic(coeff[:, :-1], coeff[:, 1:])  # faces between j and j+1

    index = np.arange(nx * ny).reshape(nx, ny)
    ii, jj = np.meshgrid(np.arange(1, nx + 1), np.arange(1, ny + 1), indexing="ij")
    west = ax[ii - 1, jj] / hx**2
    east = ax[ii, jj] / hx**2
    south = ay[ii, jj - 1] / hy**2
    north = ay[ii, jj] / hy**2

    rows = [index.ravel()]
    cols = [index.ravel()]
    vals = [(west + east + south + north).ravel()]
    for weight, di, dj in ((west, -1, 0), (east, 1, 0), (south, 0, -1), (north, 0, 1)):
        ni, nj = ii + di, jj + dj
        inside = (ni >= 1) & (ni <= nx) & (nj >= 1) & (nj <= ny)
        rows.append(index[inside])
        cols.append(index[ni[inside] - 1, nj[inside] - 1])
        vals.append(-weight[inside])
    matrix = scipy.sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(nx * ny, nx * ny)
    ).tocsr()
    rhs = np.full(nx * ny, float(forcing))
    return matrix, rhs


def solve_darcy_fdm(a: FieldSample, forcing: float = 1.0, method: str = "direct") -> FieldSample:
    """Solve the Darcy problem for coefficient ``a`` and constant forcing.

    :param a: coefficient field on an endpoint grid over the unit square
    :param forcing: constant right-hand side ``f``
    :param method: ``direct`` (sparse LU) or ``cg`` (conjugate gradients)
    :raises DomainError: if ``a`` is not strictly positive
    :raises SolverError: if the residual check or CG convergence fails
    """
    matrix, rhs = assemble_darcy(a, forcing)
    if method == "direct":
        interior = scipy.sparse.linalg.spsolve(matrix.tocsc(), rhs)
    elif method == "cg":
        interior, info = scipy.sparse.linalg.cg(matrix, rhs, rtol=1e-13, maxiter=CG_MAX_ITERATIONS)
        if info != 0:
            residual = float(np.linalg.norm(matrix @ interior - rhs) / np.linalg.norm(rhs))
            raise SolverError(f"Conjugate gradients did not converge (info={info})", residual=residual)
    else:
        raise ConfigurationError(f"Unknown Darcy solve method {method!r}", key="method")

    norm = np.linalg.norm(rhs)
    residual = float(np.linalg.norm(matrix @ interior - rhs) / norm) if norm > 0 else 0.0
    if not np.isfinite(residual) or residual > RESIDUAL_TOLERANCE:
        raise SolverError(f"Darcy residual {residual:.3e} exceeds {RESIDUAL_TOLERANCE:.0e}", residual=residual)
    logger.debug("Darcy solve on %s grid, relative residual %.2e", a.grid.sizes, residual)

    u = np.zeros(a.grid.sizes)
    u[1:-1, 1:-1] = interior.reshape(a.grid.sizes[0] - 2, a.grid.sizes[1] - 2)
    return FieldSample(a.grid, u)
