"""Application context — what every CLI command receives."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from app.config import Config
    from app.plugins.plugin_manager import PluginManager


@dataclass
class AppContext:
    """
    Central service container.

    Built once in ``main.create_context`` after logging is configured and
    plugins are discovered; commands read settings and the worker count here.
    """

    config: Config
    plugin_manager: PluginManager
    jobs: int = 1
