from pathlib import Path

import click

from ..controllers.base_controller import config_from_checkpoint
from ..controllers.diagnostic_controller import DiagnosticController
from ..controllers.evaluation_controller import EvaluationController
from ..core.checkpoint import load_checkpoint
from ..core.models import Task
from ..data.io import read_pairs, read_sequences
from ..settings import FILE_NAMES
from .common import common_options, data_option, handle_errors, load_run_config, resolve_data_dir


@click.group()
def cli():
    """Evaluation and diagnostic tools"""
    pass


def _checkpoint_option(func):
    return click.option(
        "--checkpoint", "checkpoint_path", type=click.Path(dir_okay=False), default=None,
        help="Trained checkpoint (defaults to train.ckpt in --out)",
    )(func)


def _load(checkpoint_path, out_dir, config_path, seed):
    checkpoint = load_checkpoint(checkpoint_path or Path(out_dir) / FILE_NAMES["train_checkpoint"])
    if config_path is not None:
        config = load_run_config(config_path, seed)
    else:
        config = config_from_checkpoint(checkpoint, seed=seed)
    return checkpoint, config


@cli.command("eval")
@common_options
@data_option
@_checkpoint_option
@handle_errors
def evaluate(config_path, seed, out_dir, data_dir, checkpoint_path):
    """Repair the test inputs and write the evaluation report"""
    checkpoint, config = _load(checkpoint_path, out_dir, config_path, seed)
    data = resolve_data_dir(config, data_dir, out_dir)
    bad = read_sequences(data / FILE_NAMES["test_bad"])
    good = read_sequences(data / FILE_NAMES["test_good"]) if config.task is Task.CFG else None
    click.echo(click.style(f"Evaluating on {len(bad)} test inputs", fg="blue"))
    report = EvaluationController(config, out_dir).run(checkpoint, bad, good)
    for metric, value in report.values.items():
        click.echo(f"  {metric}: {value:.4f}")
    click.echo(click.style("Evaluation finished successfully!", fg="green"))


@cli.command()
@common_options
@data_option
@_checkpoint_option
@click.option("--depth", type=click.Choice(["1", "3"]), default="1", help="Critic depth")
@handle_errors
def diagnose(config_path, seed, out_dir, data_dir, checkpoint_path, depth):
    """Train a fresh critic against the frozen generator and dump diagnostics"""
    checkpoint, config = _load(checkpoint_path, out_dir, config_path, seed)
    data = resolve_data_dir(config, data_dir, out_dir)
    bad, good = read_pairs(data / FILE_NAMES["test_bad"], data / FILE_NAMES["test_good"])
    click.echo(click.style(f"Diagnosing a depth-{depth} critic", fg="blue"))
    paths = DiagnosticController(config, out_dir).run(checkpoint, int(depth), bad, good)
    for path in paths.values():
        click.echo(f"  {path}")
    click.echo(click.style("Diagnostics written successfully!", fg="green"))
