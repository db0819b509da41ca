import functools
import logging
from pathlib import Path
from typing import Any, Callable, Optional

import click

from ..core.exceptions import SeqRepairError
from ..core.models import TrainConfig, load_config

logger = logging.getLogger(__name__)


def common_options(func: Callable) -> Callable:
    """``--config``, ``--seed`` and ``--out``, shared by every command."""
    func = click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True, help="Output directory")(func)
    func = click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=None, help="Seed overriding the config")(func)
    func = click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None, help="JSON configuration file")(func)
    return func


def data_option(func: Callable) -> Callable:
    return click.option(
        "--data", "data_dir", type=click.Path(exists=True, file_okay=False), default=None,
        help="Dataset directory (defaults to paths.data_dir, then --out)",
    )(func)


def load_run_config(config_path: Optional[str], seed: Optional[int], **overrides: Any) -> TrainConfig:
    return load_config(config_path, seed=seed, **overrides)


def resolve_data_dir(config: TrainConfig, data_dir: Optional[str], out_dir: str) -> Path:
    return Path(data_dir or config.paths.data_dir or out_dir)


def fail(message: str) -> None:
    click.echo(click.style(message, fg="red"), err=True)
    click.get_current_context().exit(1)


def handle_errors(func: Callable) -> Callable:
    """Report kit errors in red and exit with status 1."""

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except SeqRepairError as e:
            logger.debug("Command failed", exc_info=True)
            fail(f"Error: {e}")

    return wrapper
