"""Unpaired sequence repair with a clipped Wasserstein critic."""

from .settings import APP_NAME, APP_VERSION

__version__ = APP_VERSION
