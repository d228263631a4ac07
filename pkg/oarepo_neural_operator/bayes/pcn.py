#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""Preconditioned Crank-Nicolson MCMC and the solver/surrogate comparison."""

from __future__ import annotations

import csv
import dataclasses
import logging
import math
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np
from tqdm import tqdm

from oarepo_neural_operator.artifacts import write_block, write_manifest
from oarepo_neural_operator.bayes.inverse import log_likelihood
from oarepo_neural_operator.random_fields import Rng, sample_gaussian
from oarepo_neural_operator.train import relative_l2

if TYPE_CHECKING:
    from oarepo_neural_operator.bayes.inverse import InverseProblemSpec
    from oarepo_neural_operator.grid import FieldSample

logger = logging.getLogger(__name__)

ACCEPTANCE_BAND = (0.05, 0.95)
TIMING_NAME = "timing.csv"


@dataclasses.dataclass
class ChainResult:
    """Posterior mean, thinned retained samples and acceptance statistics."""

    mean: FieldSample
    samples: np.ndarray
    acceptance_rate: float
    accepted: int
    proposals: int
    spec: InverseProblemSpec
    final_state: FieldSample

    def save(self, directory: str | Path) -> Path:
        """Manifest, ``posterior_mean.bin`` and ``samples.bin``."""
        directory = Path(directory)
        mean_shape = write_block(directory / "posterior_mean.bin", self.mean.values)
        samples_shape = write_block(directory / "samples.bin", self.samples)
        write_manifest(
            directory,
            "chain",
            {
                "spec": self.spec.to_dict(),
                "grid": self.mean.grid.to_dict(),
                "acceptance_rate": self.acceptance_rate,
                "accepted": self.accepted,
                "proposals": self.proposals,
                "thin": self.spec.thin,
                "mean_shape": list(mean_shape),
                "samples_shape": list(samples_shape),
            },
        )
        return directory


def suggest_beta(beta: float, acceptance_rate: float) -> float:
    """Step size nudged toward a moderate acceptance rate."""
    if acceptance_rate < ACCEPTANCE_BAND[0]:
        return beta / 2.0
    if acceptance_rate > ACCEPTANCE_BAND[1]:
        return min(1.0, max(2.0 * beta, 0.01))
    return beta


def pcn_chain(
    spec: InverseProblemSpec,
    y: np.ndarray,
    rng: Rng,
    initial: FieldSample | None = None,
    progress: bool = False,
) -> ChainResult:
    """Run ``burn_in + samples`` pCN steps and average the retained states.

    Proposals are ``sqrt(1 - beta^2) w + beta xi`` with ``xi`` drawn from the
    Gaussian prior; acceptance uses ``min(0, Phi(w) - Phi(w'))`` in log space.
    """
    grid = spec.grid()
    w = initial if initial is not None else sample_gaussian(spec.prior, grid, rng)
    phi = -log_likelihood(w, y, spec)
    keep = math.sqrt(1.0 - spec.beta**2)
    total = np.zeros_like(w.values)
    stored = []
    accepted = 0
    steps = spec.burn_in + spec.samples

    for step in tqdm(range(steps), desc="pcn", disable=not progress):
        xi = sample_gaussian(spec.prior, grid, rng)
        proposal = w.with_values(keep * w.values + spec.beta * xi.values)
        phi_proposal = -log_likelihood(proposal, y, spec)
        log_alpha = min(0.0, phi - phi_proposal) if math.isfinite(phi_proposal) else -math.inf
        if math.log(1.0 - rng.uniform(0.0, 1.0)) <= log_alpha:
            w, phi = proposal, phi_proposal
            if step >= spec.burn_in:
                accepted += 1
        if step >= spec.burn_in:
            total += w.values
            if (step - spec.burn_in) % spec.thin == 0:
                stored.append(w.values.copy())

    rate = accepted / spec.samples
    logger.info("pCN chain finished: %d retained states, acceptance %.3f", spec.samples, rate)
    if not ACCEPTANCE_BAND[0] <= rate <= ACCEPTANCE_BAND[1]:
        logger.warning(
            "pCN acceptance rate %.3f outside [%.2f, %.2f]; consider beta=%.4g instead of %.4g",
            rate,
            *ACCEPTANCE_BAND,
            suggest_beta(spec.beta, rate),
            spec.beta,
        )
    return ChainResult(
        mean=w.with_values(total / spec.samples),
        samples=np.stack(stored),
        acceptance_rate=rate,
        accepted=accepted,
        proposals=spec.samples,
        spec=spec,
        final_state=w,
    )


@dataclasses.dataclass
class InversionComparison:
    """Chains driven by two forward maps from a common proposal stream."""

    solver: ChainResult
    surrogate: ChainResult
    pushforwards: tuple[FieldSample, FieldSample]
    timing: list[dict[str, Any]]

    @property
    def mean_difference(self) -> float:
        """Relative L2 distance of the surrogate posterior mean from the solver one."""
        return relative_l2(self.surrogate.mean, self.solver.mean)

    def save_timing(self, path: str | Path) -> Path:
        """CSV ``forward_map,calls,seconds,seconds_per_call``."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as f:
            writer = csv.DictWriter(f, fieldnames=["forward_map", "calls", "seconds", "seconds_per_call"])
            writer.writeheader()
            writer.writerows(self.timing)
        return path

    def save(self, directory: str | Path) -> Path:
        """Both chains, the pushforwards of the means and the timing report."""
        directory = Path(directory)
        self.solver.save(directory / "solver")
        self.surrogate.save(directory / "surrogate")
        write_block(directory / "solver" / "pushforward.bin", self.pushforwards[0].values)
        write_block(directory / "surrogate" / "pushforward.bin", self.pushforwards[1].values)
        self.save_timing(directory / TIMING_NAME)
        return directory


def invert_compare(
    solver_spec: InverseProblemSpec,
    surrogate_spec: InverseProblemSpec,
    y: np.ndarray,
    seed: int,
    stream: int = 0,
    progress: bool = False,
) -> InversionComparison:
    """Run the solver and surrogate chains on the same observations and proposal stream."""
    results = []
    timing = []
    for spec in (solver_spec, surrogate_spec):
        spec.forward_map.reset_timing()
        result = pcn_chain(spec, y, Rng(seed, stream), progress=progress)
        results.append(result)
        fm = spec.forward_map
        timing.append(
            {"forward_map": fm.name, "calls": fm.calls, "seconds": fm.seconds, "seconds_per_call": fm.seconds_per_call}
        )
        logger.info("%s forward map: %d calls, %.3e s per call", fm.name, fm.calls, fm.seconds_per_call)
    pushforwards = (solver_spec.forward_map(results[0].mean), surrogate_spec.forward_map(results[1].mean))
    return InversionComparison(results[0], results[1], pushforwards, timing)
