"""Tests for plugin discovery and lookup."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from app.core.cavity import primary_wavenumber
from app.core.transducer import mode_coupling
from app.errors import InvalidArgument
from app.models.cavity import CavityMode
from app.models.dispersion import EngineName
from app.models.film import BiasField, FerriteFilm
from app.models.transducer import TransducerPair
from app.plugins.base import CurrentModel
from app.plugins.plugin_manager import PluginManager, get_plugin_manager, reset_plugin_manager


class UniformCurrent(CurrentModel):
    @property
    def name(self) -> str:
        return "uniform"

    @property
    def display_name(self) -> str:
        return "Uniform"

    def weight(self, base_width: float, width: np.ndarray) -> np.ndarray:
        return np.ones_like(np.asarray(width, dtype=float))


class TestDiscovery:
    def test_engines_found(self) -> None:
        pm = get_plugin_manager()
        assert {e.name for e in pm.engines} == {"paper", "de-oracle", "ks"}
        assert {m.name for m in pm.current_models} == {"inverse_width"}

    def test_global_instance_is_shared(self) -> None:
        assert get_plugin_manager() is get_plugin_manager()

    def test_first_use_from_many_threads(self) -> None:
        for _ in range(20):
            reset_plugin_manager()
            with ThreadPoolExecutor(max_workers=16) as pool:
                managers = list(pool.map(lambda _: get_plugin_manager(), range(64)))
            assert all(pm is managers[0] for pm in managers)
            assert all(len(pm.engines) == 3 for pm in managers)

    def test_fresh_manager_is_empty_until_discovery(self) -> None:
        pm = PluginManager()
        assert pm.engines == []
        pm.discover_plugins()
        assert len(pm.engines) == 3


class TestLookup:
    def test_short_oracle_spelling(self, film: FerriteFilm, bias: BiasField) -> None:
        engine = get_plugin_manager().get_engine("de")
        assert engine.tag == EngineName.DE_ORACLE
        assert engine.resolves_width_modes is False
        a = engine.evaluate(film, bias, 500.0, 1)
        b = engine.evaluate(film, bias, 500.0, 4)
        assert a.f == b.f == pytest.approx(9.378868e9, rel=1e-6)

    def test_width_resolving_engines(self) -> None:
        pm = get_plugin_manager()
        assert pm.get_engine(EngineName.KS).resolves_width_modes
        assert pm.get_engine("paper").resolves_width_modes

    @pytest.mark.parametrize("name", ["fdtd", ""])
    def test_unknown_engine(self, name: str) -> None:
        with pytest.raises(InvalidArgument):
            get_plugin_manager().get_engine(name)

    def test_unknown_current_model(self) -> None:
        with pytest.raises(InvalidArgument, match="Unknown current model"):
            get_plugin_manager().get_current_model("skin_effect")


class TestCurrentModels:
    def test_inverse_width(self) -> None:
        model = get_plugin_manager().get_current_model("inverse_width")
        weights = model.weight(10e-4, np.array([10e-4, 20e-4]))
        assert weights.tolist() == pytest.approx([1.0, 0.5])

    def test_registered_model_drives_coupling(self, film: FerriteFilm) -> None:
        get_plugin_manager().register_current_model(UniformCurrent())
        pair = TransducerPair(current_model="uniform")
        modes = [
            CavityMode(1, m, primary_wavenumber(film, 1), m * math.pi / film.width, 9e9)
            for m in (1, 3)
        ]
        spectrum = mode_coupling(pair, film, modes)
        assert spectrum.magnitude(1, 3) / spectrum.magnitude(1, 1) == pytest.approx(
            1 / 3, abs=1e-6
        )
