#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Input/output datasets for the test problems and their on-disk layout."""

from __future__ import annotations

import concurrent.futures
import dataclasses
import logging
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np

from oarepo_neural_operator.artifacts import content_hash, read_block, read_manifest, write_block, write_manifest
from oarepo_neural_operator.errors import ConfigurationError, SolverError
from oarepo_neural_operator.grid import FieldSample, Grid
from oarepo_neural_operator.pde.burgers import solve_burgers
from oarepo_neural_operator.pde.darcy import solve_darcy_fdm
from oarepo_neural_operator.pde.navier_stokes import default_forcing, solve_navier_stokes
from oarepo_neural_operator.pde.poisson import solve_poisson_green
from oarepo_neural_operator.pde.sampling import downsample
from oarepo_neural_operator.random_fields import MeasureSpec, sample_grf

if TYPE_CHECKING:
    from collections.abc import Sequence

    from oarepo_neural_operator.random_fields import Rng

logger = logging.getLogger(__name__)

PROBLEM_MEASURES = {
    "poisson": "poisson_source",
    "darcy": "darcy_coeff",
    "burgers": "burgers_ic",
    "ns_onestep": "ns_vorticity_ic",
    "ns_trajectory": "ns_vorticity_ic",
}
PROBLEMS = tuple(PROBLEM_MEASURES)

DEFAULT_SOLVER_PARAMS: dict[str, dict[str, Any]] = {
    "poisson": {},
    "darcy": {"forcing": 1.0, "method": "direct"},
    "burgers": {"viscosity": 0.1, "t_end": 1.0, "dt": 1e-4},
    "ns_onestep": {"viscosity": 1e-3, "t_end": 10.0, "dt": 1e-4, "forcing": True},
    "ns_trajectory": {
        "viscosity": 1e-3,
        "t_end": 50.0,
        "dt": 1e-4,
        "record_every": 1.0,
        "split": 10.0,
        "forcing": True,
    },
}


def resolve_solver_params(problem: str, overrides: dict[str, Any] | None = None) -> dict[str, Any]:
    """Problem defaults merged with overrides; unknown keys are rejected."""
    if problem not in DEFAULT_SOLVER_PARAMS:
        raise ConfigurationError(f"Unknown problem {problem!r}, expected one of {PROBLEMS}", key="problem")
    params = dict(DEFAULT_SOLVER_PARAMS[problem])
    for key, value in (overrides or {}).items():
        if key not in params:
            raise ConfigurationError(f"Solver parameter {key!r} does not apply to {problem}", key=f"data.solver.{key}")
        params[key] = value
    return params


def _stack_channels(fields: Sequence[FieldSample]) -> FieldSample:
    return FieldSample(fields[0].grid, np.concatenate([f.values for f in fields], axis=-1))


def solve_problem(problem: str, a: FieldSample, params: dict[str, Any]) -> tuple[FieldSample, FieldSample]:
    """Map one input draw to an ``(input, output)`` pair with the problem's solver."""
    if problem == "poisson":
        return a, solve_poisson_green(a)
    if problem == "darcy":
        return a, solve_darcy_fdm(a, forcing=params["forcing"], method=params["method"])
    if problem == "burgers":
        return a, solve_burgers(a, t_end=params["t_end"], viscosity=params["viscosity"], dt=params["dt"])
    forcing = default_forcing if params["forcing"] else None
    if problem == "ns_onestep":
        trajectory = solve_navier_stokes(
            a, params["t_end"], params["viscosity"], record_every=params["t_end"], dt=params["dt"], forcing=forcing
        )
        return a, trajectory[-1]
    trajectory = solve_navier_stokes(
        a, params["t_end"], params["viscosity"], record_every=params["record_every"], dt=params["dt"], forcing=forcing
    )
    split = round(params["split"] / params["record_every"])
    if not 0 < split < len(trajectory):
        raise ConfigurationError(
            f"Trajectory split at t={params['split']} leaves no input or output records", key="data.solver.split"
        )
    return _stack_channels(trajectory[:split]), _stack_channels(trajectory[split:])


@dataclasses.dataclass
class Dataset:
    """Paired input/output fields with a manifest describing their origin."""

    inputs: list[FieldSample]
    outputs: list[FieldSample]
    manifest: dict[str, Any] = dataclasses.field(default_factory=dict)

    def __post_init__(self) -> None:
        """Check pairing and grid homogeneity."""
        if len(self.inputs) != len(self.outputs):
            raise ConfigurationError(f"Dataset has {len(self.inputs)} inputs but {len(self.outputs)} outputs")
        for side in (self.inputs, self.outputs):
            if any(f.grid != side[0].grid or f.channels != side[0].channels for f in side):
                raise ConfigurationError("Dataset fields must share one grid and channel count per side")
        if self.inputs:
            self.manifest.setdefault("input_grid", self.inputs[0].grid.to_dict())
            self.manifest.setdefault("output_grid", self.outputs[0].grid.to_dict())
        self.manifest["count"] = len(self.inputs)

    def __len__(self) -> int:
        return len(self.inputs)

    @property
    def input_grid(self) -> Grid:
        """Grid of the inputs."""
        return self.inputs[0].grid if self.inputs else Grid.from_dict(self.manifest["input_grid"])

    @property
    def output_grid(self) -> Grid:
        """Grid of the outputs."""
        return self.outputs[0].grid if self.outputs else Grid.from_dict(self.manifest["output_grid"])

    @property
    def resolution(self) -> int:
        """Points per axis of the input grid."""
        return self.input_grid.sizes[0]

    def input_array(self) -> np.ndarray:
        """Inputs stacked to ``(N, *sizes, channels)``."""
        return np.stack([f.values for f in self.inputs]) if self.inputs else np.zeros((0, *self.input_grid.sizes, 1))

    def output_array(self) -> np.ndarray:
        """Outputs stacked to ``(N, *sizes, channels)``."""
        return (
            np.stack([f.values for f in self.outputs]) if self.outputs else np.zeros((0, *self.output_grid.sizes, 1))
        )

    @classmethod
    def from_arrays(
        cls, input_grid: Grid, inputs: np.ndarray, output_grid: Grid, outputs: np.ndarray, manifest: dict | None = None
    ) -> Dataset:
        """Build from stacked arrays."""
        manifest = dict(manifest or {})
        manifest.setdefault("input_grid", input_grid.to_dict())
        manifest.setdefault("output_grid", output_grid.to_dict())
        return cls(
            [FieldSample(input_grid, a) for a in inputs],
            [FieldSample(output_grid, u) for u in outputs],
            manifest,
        )

    def subset(self, indices: Sequence[int]) -> Dataset:
        """Dataset restricted to ``indices``."""
        return Dataset(
            [self.inputs[i] for i in indices], [self.outputs[i] for i in indices], dict(self.manifest)
        )

    def split(self, n_train: int) -> tuple[Dataset, Dataset]:
        """First ``n_train`` samples and the rest."""
        if not 0 <= n_train <= len(self):
            raise ConfigurationError(f"Cannot split {len(self)} samples at {n_train}", key="data.n_train")
        return self.subset(range(n_train)), self.subset(range(n_train, len(self)))

    def map_inputs(self, fn: Any) -> Dataset:
        """Dataset with ``fn`` applied to every input field."""
        return Dataset([fn(a) for a in self.inputs], list(self.outputs), dict(self.manifest))

    def downsample(self, factor: int) -> Dataset:
        """Strided subsampling of both sides by ``factor`` per axis."""
        manifest = dict(self.manifest)
        manifest.setdefault("source_resolution", self.resolution)
        manifest["input_grid"] = self.input_grid.downsampled((factor,) * self.input_grid.dims).to_dict()
        manifest["output_grid"] = self.output_grid.downsampled((factor,) * self.output_grid.dims).to_dict()
        manifest["downsample_factor"] = manifest.get("downsample_factor", 1) * factor
        return Dataset(
            [downsample(a, factor) for a in self.inputs],
            [downsample(u, factor) for u in self.outputs],
            manifest,
        )

    def save(self, directory: str | Path) -> Path:
        """Write ``inputs.bin``, ``outputs.bin`` and ``manifest.json`` to ``directory``."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        input_shape = write_block(directory / "inputs.bin", self.input_array())
        output_shape = write_block(directory / "outputs.bin", self.output_array())
        manifest = dict(self.manifest)
        manifest.update(
            {
                "input_grid": self.input_grid.to_dict(),
                "output_grid": self.output_grid.to_dict(),
                "input_shape": list(input_shape),
                "output_shape": list(output_shape),
                "content_hash": content_hash([directory / "inputs.bin", directory / "outputs.bin"]),
            }
        )
        write_manifest(directory, "dataset", manifest)
        logger.info("Wrote dataset with %d samples to %s", len(self), directory)
        return directory

    @classmethod
    def load(cls, directory: str | Path) -> Dataset:
        """Read a dataset directory written by :meth:`save`."""
        directory = Path(directory)
        manifest = read_manifest(directory, kind="dataset")
        recorded = manifest.get("content_hash")
        if recorded is not None and recorded != content_hash([directory / "inputs.bin", directory / "outputs.bin"]):
            raise ConfigurationError(f"Dataset blocks in {directory} do not match the manifest content hash")
        inputs = read_block(directory / "inputs.bin", manifest["input_shape"])
        outputs = read_block(directory / "outputs.bin", manifest["output_shape"])
        for key in ("format_version", "kind", "input_shape", "output_shape", "content_hash"):
            manifest.pop(key, None)
        return cls.from_arrays(
            Grid.from_dict(manifest["input_grid"]), inputs, Grid.from_dict(manifest["output_grid"]), outputs, manifest
        )


def build_dataset(
    problem: str,
    n: int,
    grid: Grid,
    rng: Rng,
    solver_params: dict[str, Any] | None = None,
    measure: MeasureSpec | None = None,
    workers: int = 1,
) -> Dataset:
    """Draw ``n`` inputs from the problem's measure and solve for the outputs.

    Sample ``i`` uses random stream ``i`` of ``rng``'s seed, so the result does
    not depend on ``workers``.

    :raises SolverError: re-raised with the failing ``sample_index``
    """
    params = resolve_solver_params(problem, solver_params)
    measure = measure or MeasureSpec.for_kind(PROBLEM_MEASURES[problem])
    measure.check_grid(grid)
    if n < 0:
        raise ConfigurationError(f"Sample count must be nonnegative, got {n}", key="data.n")

    def _sample(index: int) -> tuple[FieldSample, FieldSample]:
        a = sample_grf(measure, grid, rng.spawn(index))
        try:
            return solve_problem(problem, a, params)
        except SolverError as e:
            raise SolverError(
                f"Sample {index}: {e}", step=e.step, residual=e.residual, sample_index=index
            ) from e

    if workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
            pairs = list(executor.map(_sample, range(n)))
    else:
        pairs = [_sample(i) for i in range(n)]

    manifest = {
        "problem": problem,
        "measure": measure.to_dict(),
        "solver": params,
        "seed": rng.seed,
        "source_resolution": grid.sizes[0],
        "input_grid": grid.to_dict(),
    }
    if pairs:
        dataset = Dataset([p[0] for p in pairs], [p[1] for p in pairs], manifest)
    else:
        manifest["output_grid"] = grid.to_dict()
        dataset = Dataset([], [], manifest)
    logger.info("Generated %d %s samples on %s grid", n, problem, grid.sizes)
    return dataset
