from pathlib import Path

import click

from ..controllers.gan_controller import GanController
from ..controllers.pretrain_controller import PretrainController
from ..controllers.seq2seq_controller import Seq2SeqController
from ..core.checkpoint import load_checkpoint
from ..core.models import ModelKind
from ..data.io import read_pairs, read_sequences
from ..settings import FILE_NAMES
from .common import common_options, data_option, handle_errors, load_run_config, resolve_data_dir


@click.group()
def cli():
    """Training tools"""
    pass


@cli.command()
@common_options
@data_option
@handle_errors
def pretrain(config_path, seed, out_dir, data_dir):
    """Pretrain the generator as a denoising autoencoder on the good data"""
    config = load_run_config(config_path, seed)
    good = read_sequences(resolve_data_dir(config, data_dir, out_dir) / FILE_NAMES["train_good"])
    click.echo(click.style(f"Pretraining on {len(good)} sequences", fg="blue"))
    PretrainController(config, out_dir).run(good)
    click.echo(click.style("Pretraining finished successfully!", fg="green"))


@cli.command()
@common_options
@data_option
@click.option("--model", type=click.Choice([kind.value for kind in ModelKind]), default=None, help="Model variant")
@click.option("--curriculum", type=click.Choice(["on", "off"]), default=None, help="Length curriculum")
@click.option("--pretrained", "pretrained_path", type=click.Path(dir_okay=False), default=None, help="Pretrained checkpoint")
@click.option("--resume", "resume_path", type=click.Path(dir_okay=False), default=None, help="Continue from a train checkpoint")
@handle_errors
def train(config_path, seed, out_dir, data_dir, model, curriculum, pretrained_path, resume_path):
    """Train a GAN variant or the paired seq2seq baseline, optionally resuming a previous run"""
    config = load_run_config(config_path, seed, model=model)
    if curriculum is not None:
        config.curriculum.enabled = curriculum == "on"
    data = resolve_data_dir(config, data_dir, out_dir)

    pretrained_path = pretrained_path or config.paths.pretrained
    if pretrained_path is None and (Path(out_dir) / FILE_NAMES["pretrain_checkpoint"]).exists():
        pretrained_path = Path(out_dir) / FILE_NAMES["pretrain_checkpoint"]
    pretrained = load_checkpoint(pretrained_path) if pretrained_path and not resume_path else None
    resume = load_checkpoint(resume_path) if resume_path else None

    click.echo(click.style(f"Training {config.model.value} on the {config.task.value} task", fg="blue"))
    if config.model.is_gan:
        bad = read_sequences(data / FILE_NAMES["train_bad"])
        good = read_sequences(data / FILE_NAMES["train_good"])
        GanController(config, out_dir).run(bad, good, pretrained, resume)
    else:
        bad, good = read_pairs(data / FILE_NAMES["train_bad"], data / FILE_NAMES["train_good"])
        Seq2SeqController(config, out_dir).run(bad, good, pretrained, resume)
    click.echo(click.style("Training finished successfully!", fg="green"))
