"""Paper engine — dipole-exchange relation with self-consistent width quantization."""

from __future__ import annotations

from app.core.dispersion import dipole_exchange_frequency, solve_mode_frequency
from app.errors import NoSolutionInBand
from app.models.dispersion import DispersionPoint, EngineName
from app.models.film import BiasField, FerriteFilm
from app.models.response import SolverSettings
from app.plugins.base import DispersionEngine


class PaperEngine(DispersionEngine):
    """m = 0 evaluates the relation directly; m >= 1 solves the k_z(f) loop."""

    @property
    def name(self) -> str:
        return "paper"

    @property
    def display_name(self) -> str:
        return "Dipole-exchange (self-consistent)"

    @property
    def tag(self) -> EngineName:
        return EngineName.PAPER

    def evaluate(
        self,
        film: FerriteFilm,
        bias: BiasField,
        k_x: float,
        m: int,
        settings: SolverSettings | None = None,
    ) -> DispersionPoint:
        if m == 0:
            f = dipole_exchange_frequency(film, bias, k_x, 0.0, k_x)
            return DispersionPoint(k_x=k_x, m=0, f=f, k_z=k_x, engine=self.tag)
        if k_x <= 0:
            raise NoSolutionInBand(f"no propagating width mode m={m} at k_x = 0")
        s = settings or SolverSettings()
        return solve_mode_frequency(
            film, bias, k_x, m,
            scan_points=s.scan_points, max_iter=s.max_iter, tol_hz=s.tol_hz,
        )
