"""Oblique-propagation engine — in-plane dipole-exchange spectrum with k_y = mπ/W."""

from __future__ import annotations

import math

from app.core.dispersion import ks_frequency, width_wavenumber
from app.models.dispersion import DispersionPoint, EngineName
from app.models.film import BiasField, FerriteFilm
from app.models.response import SolverSettings
from app.plugins.base import DispersionEngine


class KalinikosSlavinEngine(DispersionEngine):
    @property
    def name(self) -> str:
        return "ks"

    @property
    def display_name(self) -> str:
        return "Kalinikos-Slavin (lowest unpinned mode)"

    @property
    def tag(self) -> EngineName:
        return EngineName.KS

    def evaluate(
        self,
        film: FerriteFilm,
        bias: BiasField,
        k_x: float,
        m: int,
        settings: SolverSettings | None = None,
    ) -> DispersionPoint:
        k_y = width_wavenumber(film, m)
        f = ks_frequency(film, bias, k_x, k_y)
        return DispersionPoint(k_x=k_x, m=m, f=f, k_z=math.hypot(k_x, k_y), engine=self.tag)
