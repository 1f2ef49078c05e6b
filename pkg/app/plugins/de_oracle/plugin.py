"""Surface-wave oracle engine — closed form anchored to the band edges."""

from __future__ import annotations

from app.core.dispersion import de_surface_frequency
from app.models.dispersion import DispersionPoint, EngineName
from app.models.film import BiasField, FerriteFilm
from app.models.response import SolverSettings
from app.plugins.base import DispersionEngine


class SurfaceOracleEngine(DispersionEngine):
    """Width order is ignored: every w-family shares the m = 0 frequency."""

    @property
    def name(self) -> str:
        return "de-oracle"

    @property
    def display_name(self) -> str:
        return "Surface-wave oracle"

    @property
    def tag(self) -> EngineName:
        return EngineName.DE_ORACLE

    @property
    def resolves_width_modes(self) -> bool:
        return False

    def evaluate(
        self,
        film: FerriteFilm,
        bias: BiasField,
        k_x: float,
        m: int,
        settings: SolverSettings | None = None,
    ) -> DispersionPoint:
        f = de_surface_frequency(film, bias, k_x)
        return DispersionPoint(k_x=k_x, m=m, f=f, k_z=k_x, engine=self.tag)
