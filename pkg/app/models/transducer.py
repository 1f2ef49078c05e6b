"""Transducer geometry and coupling models."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import StrEnum

from app.errors import ValidationError
from app.models.film import UM

DEFAULT_EXTENDED_ASYMMETRY = 40 * UM


class TransducerShape(StrEnum):
    STRAIGHT = "straight"
    FULL_CONE = "full_cone"
    HALF_CONE = "half_cone"
    EXTENDED_CONE = "extended_cone"


@dataclass(frozen=True)
class TransducerPair:
    """
    Apodization geometry of the input/output electrode pair (lengths in cm).

    The taper occupies the last ``hc_y`` of the aperture at each end and widens
    the electrode by up to ``hc_x``. ``arc_sag`` bends the taper into a circular
    arc; 0 keeps the three control points collinear.
    """

    shape: TransducerShape = TransducerShape.HALF_CONE
    base_width: float = 10 * UM
    hc_x: float = 65 * UM
    hc_y: float = 100 * UM
    gap0: float = 140 * UM
    tilt_deg: float = 0.0
    extended_asymmetry: float | None = None
    arc_sag: float = 0.0
    current_model: str = "inverse_width"

    def __post_init__(self) -> None:
        object.__setattr__(self, "shape", TransducerShape(self.shape))
        if self.extended_asymmetry is None:
            default = (
                DEFAULT_EXTENDED_ASYMMETRY if self.shape == TransducerShape.EXTENDED_CONE else 0.0
            )
            object.__setattr__(self, "extended_asymmetry", default)

        if not self.base_width > 0:
            raise ValidationError("base_width must be positive")
        if not self.hc_x >= 0:
            raise ValidationError("hc_x must be non-negative")
        if not self.hc_y >= 0:
            raise ValidationError("hc_y must be non-negative")
        if not self.gap0 > 0:
            raise ValidationError("gap0 must be positive")
        if not 0 <= self.tilt_deg < 90:
            raise ValidationError("tilt_deg must lie in [0, 90)")
        if not self.extended_asymmetry >= 0:
            raise ValidationError("extended_asymmetry must be non-negative")
        if self.extended_asymmetry > 0 and self.shape != TransducerShape.EXTENDED_CONE:
            raise ValidationError("extended_asymmetry applies to extended_cone only")
        if not math.isfinite(self.arc_sag):
            raise ValidationError("arc_sag must be finite")

    @property
    def is_tapered(self) -> bool:
        return self.shape != TransducerShape.STRAIGHT and self.hc_x > 0 and self.hc_y > 0

    @property
    def tilt_rad(self) -> float:
        return math.radians(self.tilt_deg)


@dataclass
class CouplingSpectrum:
    """
    Normalized coupling coefficients keyed by (n, m).

    ``scale`` is the raw magnitude of the strongest entry and ``weight_integral``
    the aperture integral of the current weight, both in cm.
    """

    entries: dict[tuple[int, int], complex] = field(default_factory=dict)
    scale: float = 1.0
    weight_integral: float = 0.0

    def magnitude(self, n: int, m: int) -> float:
        return abs(self.entries.get((n, m), 0j))

    def power(self, n: int, m: int) -> float:
        return self.magnitude(n, m) ** 2

    @classmethod
    def zero(cls, keys: list[tuple[int, int]], weight_integral: float = 0.0) -> CouplingSpectrum:
        """All-zero spectrum (no excitation)."""
        return cls(entries={k: 0j for k in keys}, scale=0.0, weight_integral=weight_integral)
