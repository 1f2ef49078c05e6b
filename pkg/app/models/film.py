"""Ferrite film, bias field and permeability models (CGS units throughout)."""

from __future__ import annotations

from dataclasses import dataclass, fields
from enum import StrEnum

from app.errors import ValidationError

# Reference values for the 15 µm LPE-YIG cavity
GAMMA_YIG = 2.8e6  # Hz/G
B_SAT_YIG = 1750.0  # G, 4πMs
EXCH_YIG = 5.18e-13  # cm²
UM = 1e-4  # cm per µm


class FieldOrientation(StrEnum):
    """Bias geometry. Only the surface-wave configuration is modelled."""

    MSSW = "mssw"  # in-plane, parallel to the transducers


@dataclass(frozen=True)
class FerriteFilm:
    """Material constants and cavity geometry of the YIG film."""

    b_sat: float = B_SAT_YIG
    gamma: float = GAMMA_YIG
    exch: float = EXCH_YIG
    thickness: float = 15 * UM
    length: float = 280 * UM
    width: float = 400 * UM
    q_loaded: float = 500.0

    def __post_init__(self) -> None:
        for f in fields(self):
            if not getattr(self, f.name) > 0:
                raise ValidationError(f"{f.name} must be positive")
        if self.thickness >= self.width:
            raise ValidationError("thickness must be smaller than width (thin-film regime)")
        if self.thickness >= self.length:
            raise ValidationError("thickness must be smaller than length (thin-film regime)")


@dataclass(frozen=True)
class BiasField:
    """Applied bias. ``h0`` is validated by the operations that consume it."""

    h0: float
    orientation: FieldOrientation = FieldOrientation.MSSW


@dataclass(frozen=True)
class PermeabilityTensor:
    """Lossless tensor components at one frequency."""

    mu1: float
    mu2: float
    omega_norm: float
    omega_h: float
