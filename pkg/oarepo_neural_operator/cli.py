#
# Copyright (c) 2025 CESNET z.s.p.o.
#
# This file is a part of oarepo-neural-operator.
#
# oarepo-neural-operator is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.
#
"""CLI commands generating data, training, evaluating and inverting."""

from __future__ import annotations

import logging
import sys
from typing import TYPE_CHECKING

import click

from oarepo_neural_operator.errors import (
    ConfigurationError,
    ContractError,
    DomainError,
    NumericalError,
    SolverError,
)
from oarepo_neural_operator.pipeline import run_pipeline
from oarepo_neural_operator.run_config import RunConfigService

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

logger = logging.getLogger(__name__)

EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _run(
    config: str | None,
    overrides: Sequence[str],
    output_dir: str | None,
    steps: Sequence[str] | None,
    command: str,
) -> None:
    """Resolve the configuration, run the steps and map failures to exit codes."""
    try:
        service = RunConfigService(config, overrides)
        if output_dir:
            service.set("output_dir", output_dir)
        artifacts = run_pipeline(service, steps, command)
        for artifact in artifacts:
            click.echo(f"{artifact.kind}: {artifact.path}")

    except (ConfigurationError, ContractError, DomainError, FileNotFoundError) as e:
        logger.exception("Command %s failed", command)
        click.echo(f"Error: {e}", err=True)
        sys.exit(EXIT_CONFIG)
    except NumericalError as e:
        logger.exception("Command %s failed", command)
        click.echo(f"Error: {e}", err=True)
        if e.checkpoint:
            click.echo(f"Last checkpoint: {e.checkpoint}", err=True)
        sys.exit(EXIT_NUMERIC)
    except SolverError as e:
        logger.exception("Command %s failed", command)
        click.echo(f"Error: {e}", err=True)
        sys.exit(EXIT_NUMERIC)


def run_options(fn: Callable) -> Callable:
    """Options shared by all commands."""
    fn = click.option(
        "--output-dir",
        "-o",
        type=click.Path(file_okay=False),
        help="Output directory (default: $NEURAL_OPERATOR_OUTPUT_ROOT/<command>)",
    )(fn)
    fn = click.option(
        "--set",
        "overrides",
        multiple=True,
        metavar="SECTION.KEY=VALUE",
        help="Override a configuration value; VALUE is parsed as JSON when possible",
    )(fn)
    return click.option("--config", "-c", type=click.Path(dir_okay=False), help="JSON run configuration")(fn)


@click.group()
@click.option(
    "--log-level",
    default="INFO",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    help="Logging verbosity",
)
def cli(log_level: str) -> None:
    """OARepo Neural Operator - data generation, training, evaluation and inversion."""
    logging.basicConfig(level=log_level.upper(), format="%(asctime)s %(levelname)s %(name)s: %(message)s")


@cli.command("gen-data")
@run_options
def gen_data(config: str | None, overrides: tuple[str, ...], output_dir: str | None) -> None:
    """Generate a dataset with the problem's numerical solver."""
    _run(config, overrides, output_dir, ["gen_data"], "gen_data")


@cli.command("train")
@run_options
def train(config: str | None, overrides: tuple[str, ...], output_dir: str | None) -> None:
    """Train a model on data.dataset."""
    _run(config, overrides, output_dir, ["train"], "train")


@cli.command("eval")
@run_options
def evaluate(config: str | None, overrides: tuple[str, ...], output_dir: str | None) -> None:
    """Evaluate eval.checkpoint on the held-out part of data.dataset."""
    _run(config, overrides, output_dir, ["eval"], "eval")


@cli.command("superres")
@run_options
def superres(config: str | None, overrides: tuple[str, ...], output_dir: str | None) -> None:
    """Zero-shot evaluation of eval.checkpoint on eval.superres_dataset."""
    _run(config, overrides, output_dir, ["superres"], "superres")


@cli.command("invert")
@run_options
def invert(config: str | None, overrides: tuple[str, ...], output_dir: str | None) -> None:
    """Run the pCN inversion of the initial vorticity."""
    _run(config, overrides, output_dir, ["invert"], "invert")


@cli.command("spectra")
@run_options
def spectra(config: str | None, overrides: tuple[str, ...], output_dir: str | None) -> None:
    """Export spectra of the held-out outputs (and predictions, with a checkpoint)."""
    _run(config, overrides, output_dir, ["spectra"], "spectra")


@cli.group()
def pipeline() -> None:
    """Run several steps in one go."""


@pipeline.command("run")
@run_options
@click.argument("steps", nargs=-1)
def pipeline_run(
    config: str | None, overrides: tuple[str, ...], output_dir: str | None, steps: tuple[str, ...]
) -> None:
    r"""Run STEPS (or the configured pipeline_steps) in order.

    \b
    Arguments:
        STEPS: step names, e.g. gen_data train eval
    """
    _run(config, overrides, output_dir, list(steps) or None, "pipeline")
