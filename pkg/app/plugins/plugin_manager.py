"""Plugin auto-discovery — manages the dispersion-engine and current-model registries."""

from __future__ import annotations

import importlib
import pkgutil
import threading
from pathlib import Path

from loguru import logger

from app.errors import InvalidArgument
from app.models.dispersion import EngineName
from app.plugins.base import CurrentModel, DispersionEngine

_instance: PluginManager | None = None
_instance_lock = threading.Lock()


def get_plugin_manager() -> PluginManager:
    """Return the process-wide PluginManager, discovering plugins on first use."""
    global _instance
    with _instance_lock:
        if _instance is None:
            manager = PluginManager()
            manager.discover_plugins()
            _instance = manager
        return _instance


def reset_plugin_manager() -> None:
    """Drop the global instance (for testing)."""
    global _instance
    with _instance_lock:
        _instance = None


class PluginManager:
    """
    Auto-discovers plugin subclasses from ``app/plugins/<name>/plugin.py``.

    Each plugin module may export a ``DispersionEngine`` subclass, a
    ``CurrentModel`` subclass, or both.

    Usage::

        pm = PluginManager()
        pm.discover_plugins()
        pm.get_engine("ks")                  # → KalinikosSlavinEngine
        pm.get_current_model("inverse_width")
    """

    def __init__(self) -> None:
        self._engines: dict[str, DispersionEngine] = {}
        self._current_models: dict[str, CurrentModel] = {}

    # ── Read-only access ──

    @property
    def engines(self) -> list[DispersionEngine]:
        return list(self._engines.values())

    @property
    def current_models(self) -> list[CurrentModel]:
        return list(self._current_models.values())

    # ── Discovery ──

    def discover_plugins(self) -> None:
        """Scan ``app/plugins/*/plugin.py`` and register all found plugins."""
        self._engines.clear()
        self._current_models.clear()
        plugins_dir = Path(__file__).parent

        for module_info in sorted(pkgutil.iter_modules([str(plugins_dir)]), key=lambda m: m.name):
            if not module_info.ispkg:
                continue
            module_name = f"app.plugins.{module_info.name}.plugin"
            try:
                module = importlib.import_module(module_name)
            except ImportError as e:
                logger.debug(f"Skipping plugin directory '{module_info.name}': {e}")
                continue

            for attr_name in dir(module):
                attr = getattr(module, attr_name)
                if not isinstance(attr, type) or getattr(attr, "__abstractmethods__", None):
                    continue
                if issubclass(attr, DispersionEngine) and attr is not DispersionEngine:
                    self.register_engine(attr())
                elif issubclass(attr, CurrentModel) and attr is not CurrentModel:
                    self.register_current_model(attr())

    def register_engine(self, engine: DispersionEngine) -> None:
        self._engines[engine.name] = engine
        logger.debug(f"Loaded dispersion engine: {engine.display_name} ({engine.name})")

    def register_current_model(self, model: CurrentModel) -> None:
        self._current_models[model.name] = model
        logger.debug(f"Loaded current model: {model.display_name} ({model.name})")

    # ── Queries ──

    def get_engine(self, name: EngineName | str) -> DispersionEngine:
        try:
            key = str(EngineName.parse(name))
        except ValueError as e:
            raise InvalidArgument(f"Unknown dispersion engine: {name!r}") from e
        engine = self._engines.get(key)
        if engine is None:
            raise InvalidArgument(f"Dispersion engine not available: {key!r}")
        return engine

    def get_current_model(self, name: str) -> CurrentModel:
        model = self._current_models.get(name)
        if model is None:
            raise InvalidArgument(f"Unknown current model: {name!r}")
        return model
