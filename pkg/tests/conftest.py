"""Shared fixtures: the reference film, bias points and device configs."""

from __future__ import annotations

import pytest

from app.data.device_config import device_config_from_dict
from app.models.film import BiasField, FerriteFilm
from app.models.response import DeviceConfig
from app.plugins.plugin_manager import reset_plugin_manager


@pytest.fixture(autouse=True)
def _fresh_plugins():
    reset_plugin_manager()
    yield
    reset_plugin_manager()


@pytest.fixture
def film() -> FerriteFilm:
    return FerriteFilm()


@pytest.fixture
def bias() -> BiasField:
    return BiasField(2500.0)


@pytest.fixture
def device() -> DeviceConfig:
    """Half-cone reference device with every default resolved."""
    return device_config_from_dict({})
