"""Command line entry point.

Exit codes: 0 success, 2 unusable input (file, schema, option values),
3 valid input whose data falls outside the representable domain,
4 numerical failure or I/O error during execution.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from ._version import __version__
from .errors import (
    BornRuleUnavailableError,
    DegenerateCellError,
    DegenerateContextError,
    IncompatibilityError,
    InputValidationError,
    NotRepresentableError,
    NumericalError,
    PhaseAliasingError,
    ScenarioError,
)
from .runner import run_scenario
from .scenario import load_scenario

_INPUT_ERRORS = (ScenarioError, InputValidationError)
_DOMAIN_ERRORS = (
    NotRepresentableError,
    DegenerateCellError,
    DegenerateContextError,
    IncompatibilityError,
    BornRuleUnavailableError,
)
_NUMERIC_ERRORS = (NumericalError, PhaseAliasingError, OSError)


@click.group()
@click.version_option(__version__, prog_name="qlrep")
def main() -> None:
    """Contextual probability toolkit: representation, dynamics, conservation."""


@main.command()
@click.argument("scenario", type=click.Path(dir_okay=False))
@click.option("--out-dir", type=click.Path(file_okay=False), default=None,
              help="Directory for relative output paths (default: cwd).")
@click.option("--seed", type=int, default=None,
              help="Override the scenario seed.")
@click.option("--h", "h_value", type=float, default=None,
              help="Override the action-scale constant.")
@click.option("--tolerance-profile", type=click.Choice(["default", "strict"]),
              default="default", show_default=True,
              help="strict additionally rejects boundary cases.")
def run(scenario: str, out_dir: str | None, seed: int | None,
        h_value: float | None, tolerance_profile: str) -> None:
    """Run a TOML scenario and emit its configured outputs."""
    try:
        scn = load_scenario(scenario, h_override=h_value)
        report = run_scenario(
            scn,
            out_dir=out_dir,
            seed=seed,
            h=h_value,
            tolerance_profile=tolerance_profile,
            scenario_name=Path(scenario).stem,
        )
    except _INPUT_ERRORS as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    except _DOMAIN_ERRORS as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(3)
    except _NUMERIC_ERRORS as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(4)
    click.echo(json.dumps(report, indent=2))


if __name__ == "__main__":
    main()
