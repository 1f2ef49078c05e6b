"""Plugin base classes — two plugin kinds for the two pluggable physics concerns.

DispersionEngine → mode frequency for a (k_x, width order) pair
CurrentModel     → current-density weight along the electrode from its local width
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    import numpy as np

    from app.models.dispersion import DispersionPoint, EngineName
    from app.models.film import BiasField, FerriteFilm
    from app.models.response import SolverSettings


# ═══════════════════════════════════════════════════════════════════════════════
#  DispersionEngine: serves the dispersion and cavity modules
# ═══════════════════════════════════════════════════════════════════════════════


class DispersionEngine(ABC):
    """
    Abstract base for **dispersion engines**.

    Each implementation turns a propagation wavenumber and a width order into a
    frequency. Failures (no root, non-convergence) are raised as toolkit errors;
    callers decide whether they become gap markers.
    """

    # ── Required interface ──

    @property
    @abstractmethod
    def name(self) -> str:
        """Registry key (e.g. 'paper', 'ks')."""
        ...

    @property
    @abstractmethod
    def display_name(self) -> str:
        ...

    @property
    @abstractmethod
    def tag(self) -> EngineName:
        ...

    @abstractmethod
    def evaluate(
        self,
        film: FerriteFilm,
        bias: BiasField,
        k_x: float,
        m: int,
        settings: SolverSettings | None = None,
    ) -> DispersionPoint:
        """Frequency of the (k_x, m) point."""
        ...

    # ── Optional interface ──

    @property
    def resolves_width_modes(self) -> bool:
        """False when the frequency does not depend on the width order."""
        return True


# ═══════════════════════════════════════════════════════════════════════════════
#  CurrentModel: serves the transducer module
# ═══════════════════════════════════════════════════════════════════════════════


class CurrentModel(ABC):
    """
    Abstract base for **current-density models**.

    Maps the local electrode width to a dimensionless excitation weight,
    normalized to 1 where the electrode has its base width.
    """

    @property
    @abstractmethod
    def name(self) -> str:
        ...

    @property
    @abstractmethod
    def display_name(self) -> str:
        ...

    @abstractmethod
    def weight(self, base_width: float, width: np.ndarray) -> np.ndarray:
        """Weight for each local width (same shape as ``width``)."""
        ...
