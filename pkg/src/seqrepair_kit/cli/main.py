import logging

import click

from ..settings import APP_NAME, APP_VERSION
from . import manage_data, manage_evaluation, manage_training


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Log debug details")
@click.version_option(APP_VERSION, prog_name=APP_NAME)
def cli(verbose):
    """Unpaired sequence repair: data generation, training and evaluation"""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


for group in (manage_data.cli, manage_training.cli, manage_evaluation.cli):
    for name, command in group.commands.items():
        cli.add_command(command, name)


if __name__ == "__main__":
    cli()
