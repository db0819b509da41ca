import click

from ..controllers.data_controller import DataController
from .common import common_options, handle_errors, load_run_config


@click.group()
def cli():
    """Benchmark dataset tools"""
    pass


@cli.command("gen-data")
@common_options
@click.option("--task", type=click.Choice(["sort", "cfg"]), default=None, help="Task overriding the config")
@click.option("--unpaired", is_flag=True, help="Draw good and bad training files from disjoint pairs")
@handle_errors
def gen_data(config_path, seed, out_dir, task, unpaired):
    """Generate train/test pairs for a benchmark task"""
    config = load_run_config(config_path, seed, task=task)
    click.echo(click.style(f"Generating {config.task.value} data (seed {config.seed})", fg="blue"))
    paths = DataController(config, out_dir).run(unpaired=unpaired)
    for path in paths.values():
        click.echo(f"  {path}")
    click.echo(click.style("Data generated successfully!", fg="green"))
