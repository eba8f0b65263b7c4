import functools
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import click
from pydantic import BaseModel, ValidationError

from enzyme_qssa.analysis.reports import bound_report
from enzyme_qssa.analysis.transient import depletion_bounds
from enzyme_qssa.core.config import settings
from enzyme_qssa.core.exceptions import DomainError, HorizonError, IntegrationError, InvalidInputError
from enzyme_qssa.core.logging_config import setup_logging
from enzyme_qssa.integration.integrator import integrator
from enzyme_qssa.integration.options import IntegrationOptions
from enzyme_qssa.kinetics.parameters import ReactionConfig
from enzyme_qssa.services.export import write_csv, write_json
from enzyme_qssa.services.figures import E0_GRID, GRID_RATES, S0_PANELS, figure_builder
from enzyme_qssa.services.quick_reference import write_quick_reference
from enzyme_qssa.services.sweep import SweepSpec, sweep_runner
from enzyme_qssa.services.validation import validation_suite

logger = logging.getLogger(__name__)

EXIT_HARD_FAILURE = 1


class IntegrationSection(BaseModel):
    rel_tol: Optional[float] = None
    abs_tol: Optional[float] = None
    t_end: Optional[float] = None


class RunConfigFile(BaseModel):
    k1: Optional[float] = None
    k_m1: Optional[float] = None
    k2: Optional[float] = None
    s0: Optional[float] = None
    e0: Optional[float] = None
    q: Optional[float] = None
    integration: IntegrationSection = IntegrationSection()


def run_options(func):
    """Kinetic and integration flags shared by every command; flags override --config values."""
    options = [
        click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False, path_type=Path),
                     help="JSON file with k1, k_m1, k2, s0, e0, q and an integration section."),
        click.option("--k1", type=float),
        click.option("--k-m1", "k_m1", type=float),
        click.option("--k2", type=float),
        click.option("--s0", type=float),
        click.option("--e0", type=float),
        click.option("--q", type=float),
        click.option("--rel-tol", type=float),
        click.option("--abs-tol", type=float),
        click.option("--t-end", type=float),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def resolve_run(params: Dict[str, Any]) -> Tuple[ReactionConfig, float, IntegrationOptions]:
    file_config = RunConfigFile()
    if params.get("config_path") is not None:
        try:
            file_config = RunConfigFile(**json.loads(params["config_path"].read_text()))
        except (json.JSONDecodeError, ValidationError) as e:
            raise click.UsageError(f"Invalid config file {params['config_path']}: {e}")

    values = file_config.model_dump(exclude={"integration", "q"})
    for key in values:
        if params.get(key) is not None:
            values[key] = params[key]
    missing = [key for key, value in values.items() if value is None]
    if missing:
        raise click.UsageError(f"Missing kinetic parameters: {', '.join(missing)}")

    integration = file_config.integration.model_dump(exclude_none=True)
    for key in ("rel_tol", "abs_tol", "t_end"):
        if params.get(key) is not None:
            integration[key] = params[key]

    q = params.get("q") if params.get("q") is not None else file_config.q
    if q is None:
        q = settings.QSSA_DEFAULT_Q
    if not 0 < q < 1:
        raise click.UsageError(f"q must lie in (0, 1), got {q}")
    return ReactionConfig.from_values(**values), q, IntegrationOptions(**integration)


def handle_errors(func):
    """Map library errors to exit codes: usage problems exit 2, integration failures exit 1."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (InvalidInputError, DomainError, ValidationError) as e:
            raise click.UsageError(str(e))
        except IntegrationError as e:
            logger.error(f"Integration failed: {e}", exc_info=True)
            click.echo(f"Error: {e}", err=True)
            raise click.exceptions.Exit(EXIT_HARD_FAILURE)

    return wrapper


def echo_json(payload: Dict[str, Any]) -> None:
    click.echo(json.dumps(payload, indent=2))


def _out_path(out: Optional[Path], default_name: str) -> Path:
    return out if out is not None else settings.QSSA_OUT_DIR / default_name


@click.group()
@click.option("--log-level", default=None, help="Overrides QSSA_LOG_LEVEL.")
def main(log_level: Optional[str]):
    """Michaelis-Menten QSS reduction: simulation, closed-form bounds and their numerical verification."""
    setup_logging(log_level or settings.QSSA_LOG_LEVEL, settings.QSSA_LOG_FORMAT)


@main.command()
@run_options
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None)
@handle_errors
def simulate(out: Optional[Path], **params):
    """Integrate the full system from (s0, 0) and write t,s,c,g_s,L."""
    config, _, options = resolve_run(params)
    trajectory = integrator.integrate_full(config, options)
    events = []
    if config.e0 > 0 and config.s0 > 0:
        try:
            events.append(integrator.locate_crossing(trajectory, options).t_cross)
        except HorizonError:
            logger.warning(f"No crossing before t_end={trajectory.t_end:.6g}; trajectory written without event row")
    manifest = {"config": config.as_flat_dict(), "integration": options.model_dump(mode="json")}
    path = write_csv(trajectory.to_frame(events), _out_path(out, "trajectory.csv"), manifest)
    click.echo(str(path))


@main.command()
@run_options
@handle_errors
def crossing(**params):
    """Locate t_cross, s_cross and c_cross."""
    config, _, options = resolve_run(params)
    echo_json(integrator.find_crossing(config, options).model_dump(mode="json"))


@main.command()
@run_options
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None)
@handle_errors
def bounds(out: Optional[Path], **params):
    """Every closed-form bound with its validity flags."""
    config, q, _ = resolve_run(params)
    payload = bound_report(config, q).to_dict()
    if out is not None:
        write_json(payload, out)
    echo_json(payload)


@main.command()
@run_options
@click.option("--r", "r", type=float, default=1.0, show_default=True)
@handle_errors
def depletion(r: float, **params):
    """Transient substrate depletion bounds."""
    config, q, _ = resolve_run(params)
    echo_json(depletion_bounds(config, q, r).model_dump(mode="json"))


@main.command()
@run_options
@click.option("--scope", type=click.Choice(["transient", "slow", "all"]), default="transient", show_default=True)
@click.option("--grid", is_flag=True, help="Verify the 4 x 12 crossing grid instead of a single configuration.")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None)
@handle_errors
def verify(scope: str, grid: bool, out: Optional[Path], **params):
    """Check the bounds against integrated trajectories; exits 1 on any hard failure."""
    if grid:
        _, q, options = resolve_run({**params, **GRID_RATES, "s0": 1.0, "e0": 1.0})
        configs = [ReactionConfig.from_values(**GRID_RATES, s0=s0, e0=e0) for s0 in S0_PANELS for e0 in E0_GRID]
    else:
        config, q, options = resolve_run(params)
        configs = [config]

    report = validation_suite.run_suite(configs, q, options, scope)
    payload = json.loads(report.to_json())
    if out is not None:
        write_json(payload, out)
    echo_json(payload)
    if not report.all_hard_passed:
        raise click.exceptions.Exit(EXIT_HARD_FAILURE)


@main.command()
@click.argument("figure_id", required=False)
@click.option("--manifest", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None)
@click.option("--out-dir", type=click.Path(file_okay=False, path_type=Path), default=None)
@handle_errors
def figure(figure_id: Optional[str], manifest: Optional[Path], out_dir: Optional[Path]):
    """Write the CSV data behind a figure (fig1, fig2, figww, figxx, figyy, figzz, figxxz)."""
    if manifest is not None:
        dataset = figure_builder.rerun(manifest, out_dir)
    elif figure_id is not None:
        dataset = figure_builder.run_figure(figure_id, out_dir)
    else:
        raise click.UsageError("Give a FIGURE_ID or --manifest")
    echo_json(dataset.model_dump(mode="json"))


@main.command()
@run_options
@click.option("--axis", type=click.Choice(["e0", "s0", "k1", "k_m1", "k2"]), required=True)
@click.option("--values", "values_text", required=True, help="Comma-separated axis values.")
@click.option("--outputs", "outputs_text", required=True, help="Comma-separated quantities, e.g. eps_SSl,t_cross.")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None)
@handle_errors
def sweep(axis: str, values_text: str, outputs_text: str, out: Optional[Path], **params):
    """Tabulate quantities along one parameter axis."""
    try:
        values = [float(v) for v in values_text.split(",") if v.strip()]
    except ValueError:
        raise click.UsageError(f"--values must be comma-separated numbers, got '{values_text}'")
    outputs = [name.strip() for name in outputs_text.split(",") if name.strip()]
    sweep_runner.validate_outputs(outputs)

    # the swept parameter may be absent from the base configuration
    if not values:
        raise click.UsageError("--values needs at least one number")
    base_params = dict(params)
    if base_params.get(axis) is None:
        base_params[axis] = values[0]
    config, q, options = resolve_run(base_params)
    spec = SweepSpec(base=config, axis=axis, values=values, q=q, outputs=outputs)
    path = _out_path(out, f"sweep_{axis}.csv")
    sweep_runner.sweep(spec, path, options)
    click.echo(str(path))


@main.command()
@run_options
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None)
@handle_errors
def report(out: Optional[Path], **params):
    """Quick-reference JSON: constants, timescales, lowest-order estimates and exact bounds."""
    config, q, _ = resolve_run(params)
    path = write_quick_reference(config, q, _out_path(out, "report.json"))
    click.echo(str(path))


if __name__ == "__main__":
    main()
