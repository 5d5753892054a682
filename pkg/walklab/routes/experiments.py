"""
Experiment commands
"""
import functools

import click
from flask import Blueprint, current_app

from ..core.errors import WalklabError
from ..models.experiment import KINDS, ExperimentConfig
from ..utils.helpers import parse_int_list

experiments_bp = Blueprint('experiments', __name__, cli_group=None)


def fail(error: WalklabError):
    """Echo the error and its diagnostics, then exit with the error's code."""
    current_app.logger.error(f"[CLI] {type(error).__name__}: {error}")
    click.echo(f"error: {error}", err=True)
    for line in getattr(error, "diagnostics", []):
        click.echo(f"  - {line}", err=True)
    click.get_current_context().exit(error.exit_code)


def maps_errors(f):
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except WalklabError as e:
            fail(e)
    return wrapper


def run_options(f):
    """Flags shared by every experiment command."""
    options = [
        click.option("--config", "config_path", type=click.Path(dir_okay=False), help="Experiment JSON file."),
        click.option("--seed", type=int, help="Master seed."),
        click.option("--trials", type=int, help="Trials per estimate."),
        click.option("--out", type=click.Path(file_okay=False), help="Output directory."),
        click.option("--strict/--exploratory", default=None, help="Refuse uncertified regimes (default from env)."),
        click.option("--workers", type=int, help="Concurrent batches."),
        click.option("--batch-size", "batch_size", type=int),
        click.option("--mode", type=click.Choice(["sample", "enumerate"])),
        click.option("--space", type=click.Choice(["tree", "halfplane"])),
        click.option("--samples", type=int, help="Sampled configurations for the checkers."),
        # chain
        click.option("--eps", type=float),
        click.option("--q", type=float),
        click.option("--n", type=int),
        # walks
        click.option("--estimator", type=str),
        click.option("--n-list", "n_list", type=str, help="'20,40,60' or 'start:stop:step'."),
        click.option("--L", "L", type=float, help="Linear-progress slope."),
        click.option("--R", "R", type=int, help="Level width for phi_R."),
        click.option("--N", "N", type=int, help="Convolution power of mu."),
        click.option("--target", type=str),
        # casson and pipeline
        click.option("--crossover", type=str, help="'K=1,c=0.9,c0=0.1'."),
        click.option("--force-q", "force_q", type=float),
        click.option("--genus", type=int),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def resolve_config(kind, config_path, **flags) -> ExperimentConfig:
    """Schema defaults < app config (environment) < config file < flags."""
    defaults = {
        "seed": current_app.config["DEFAULT_SEED"],
        "trials": current_app.config["DEFAULT_TRIALS"],
        "out": current_app.config["OUTPUT_DIR"],
        "workers": current_app.config["WORKERS"],
        "batch_size": current_app.config["BATCH_SIZE"],
        "strict": current_app.config["STRICT"],
    }
    if flags.get("n_list") is not None:
        flags["n_list"] = parse_int_list(flags["n_list"])
    overrides = {key: value for key, value in flags.items() if value is not None}
    if kind:
        overrides["kind"] = kind
    return ExperimentConfig.load(config_path, overrides, defaults)


def execute(kind, config_path, **flags):
    cfg = resolve_config(kind, config_path, **flags)
    result = current_app.experiment_runner(cfg).run()
    for line in result.summary:
        click.echo(line)
    if result.headline is not None:
        click.echo(result.headline)
    current_app.logger.info(f"[CLI] {cfg.kind} run written to {cfg.out} ({len(result.files)} files)")
    return result


@experiments_bp.cli.command("run")
@click.option("--kind", type=click.Choice(KINDS), help="Experiment kind (else taken from --config).")
@run_options
@maps_errors
def run_command(kind, config_path, **flags):
    """Run any experiment kind."""
    execute(kind, config_path, **flags)


def _kind_command(kind: str, help_text: str):
    @run_options
    @maps_errors
    def command(config_path, **flags):
        execute(kind, config_path, **flags)
    command.__doc__ = help_text
    return experiments_bp.cli.command(kind)(command)


chain_command = _kind_command("chain", "Comparison chain: n-step law, certificate and tail bound.")
walk_command = _kind_command("walk", "Random-walk estimators.")
geom_command = _kind_command("geom", "Projection and approximate-tree checks.")
shadow_command = _kind_command("shadow", "Shadow lemma verifiers.")
casson_command = _kind_command("casson", "Casson bookkeeping, walks on Z and the crossover.")
pipeline_command = _kind_command("pipeline", "Calibration through certificate, domination and crossover.")
