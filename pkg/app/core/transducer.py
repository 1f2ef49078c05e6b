"""Transducer — apodized electrode profiles and per-mode coupling by quadrature."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from loguru import logger
from scipy.integrate import quad, quad_vec

from app.errors import (
    InvalidArgument,
    NonPhysicalGap,
    OutOfDomain,
    QuadratureFailure,
    ValidationError,
)
from app.models.cavity import CavityMode
from app.models.film import FerriteFilm
from app.models.transducer import CouplingSpectrum, TransducerPair, TransducerShape
from app.plugins.plugin_manager import get_plugin_manager

COUPLING_TOLERANCE = 1e-10  # absolute, relative to ∫weight dy
_DOMAIN_SLACK = 1e-12


@dataclass(frozen=True)
class TaperArc:
    """
    Taper offset δ(s) over s ∈ [0, length], rising from 0 to ``rise``.

    The curve is the circle through (0, 0), (length/2, rise/2 + sag) and
    (length, rise); collinear points give a straight ramp.
    """

    length: float
    rise: float
    sag: float = 0.0

    def __post_init__(self) -> None:
        if self.is_linear:
            return
        cx, cy, r = self._circle()
        side = math.copysign(1.0, self.rise / 2 + self.sag - cy)
        for y in (0.0, self.rise):
            if (y - cy) * side < -_DOMAIN_SLACK * max(self.length, self.rise):
                raise ValidationError("arc_sag too large: taper is not single-valued")
        if side < 0 and 0 < cx < self.length and cy - r < -_DOMAIN_SLACK * self.rise:
            raise ValidationError("arc_sag too large: taper narrows below the base width")

    @property
    def is_linear(self) -> bool:
        scale = max(self.length, self.rise)
        return self.length == 0 or self.rise == 0 or abs(self.sag) <= 1e-12 * scale

    def _circle(self) -> tuple[float, float, float]:
        (ax, ay), (bx, by), (cx, cy) = (
            (0.0, 0.0),
            (self.length / 2, self.rise / 2 + self.sag),
            (self.length, self.rise),
        )
        d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
        a2, b2, c2 = ax * ax + ay * ay, bx * bx + by * by, cx * cx + cy * cy
        ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d
        uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d
        return ux, uy, math.hypot(ax - ux, ay - uy)

    def offset(self, s: np.ndarray) -> np.ndarray:
        s = np.clip(s, 0.0, self.length)
        if self.length == 0 or self.rise == 0:
            return np.zeros_like(s)
        if self.is_linear:
            return self.rise * s / self.length
        cx, cy, r = self._circle()
        side = math.copysign(1.0, self.rise / 2 + self.sag - cy)
        return cy + side * np.sqrt(np.maximum(r * r - (s - cx) ** 2, 0.0))


class TransducerGeometry:
    """
    Electrode width, current weight and gap along the aperture y ∈ [0, W].

    The taper sits at both ends; extended_cone lengthens the taper at y = W.
    """

    def __init__(self, pair: TransducerPair, film: FerriteFilm) -> None:
        self._pair = pair
        self._aperture = film.width
        self._model = get_plugin_manager().get_current_model(pair.current_model)
        upper = pair.hc_y
        if pair.shape == TransducerShape.EXTENDED_CONE:
            upper += pair.extended_asymmetry
        if pair.hc_y > film.width / 2 or upper > film.width / 2:
            raise ValidationError("taper extent must not exceed W/2")
        self._low = TaperArc(pair.hc_y, pair.hc_x, pair.arc_sag)
        self._high = TaperArc(upper, pair.hc_x, pair.arc_sag)

    @property
    def pair(self) -> TransducerPair:
        return self._pair

    @property
    def aperture(self) -> float:
        return self._aperture

    @property
    def breakpoints(self) -> list[float]:
        """Interior kinks of the profile (taper starts)."""
        if not self._pair.is_tapered:
            return []
        w = self._aperture
        return sorted({p for p in (self._low.length, w - self._high.length) if 0 < p < w})

    def _check(self, y: np.ndarray) -> None:
        slack = _DOMAIN_SLACK * self._aperture
        if np.any(y < -slack) or np.any(y > self._aperture + slack):
            raise OutOfDomain(f"y must lie in [0, {self._aperture:g}] cm")

    def offset(self, y: np.ndarray) -> np.ndarray:
        """Widening δ(y) over the base width."""
        y = np.asarray(y, dtype=float)
        self._check(y)
        if not self._pair.is_tapered:
            return np.zeros_like(y)
        low = self._low.offset(self._low.length - y)
        high = self._high.offset(y - (self._aperture - self._high.length))
        return np.where(
            y < self._low.length,
            low,
            np.where(y > self._aperture - self._high.length, high, 0.0),
        )

    def width(self, y: np.ndarray) -> np.ndarray:
        return self._pair.base_width + self.offset(y)

    def weight(self, y: np.ndarray) -> np.ndarray:
        return self._model.weight(self._pair.base_width, self.width(y))

    def gap(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if self._pair.shape != TransducerShape.FULL_CONE:
            self._check(y)
            return np.full_like(y, self._pair.gap0)
        gap = self._pair.gap0 - 2.0 * self.offset(y)
        if np.any(gap <= 0):
            raise NonPhysicalGap("full-cone electrodes close the transducer gap")
        return gap

    def phase(self, y: np.ndarray) -> np.ndarray:
        """Path-length deviation (cm) multiplying k_xn in the coupling phase."""
        y = np.asarray(y, dtype=float)
        return self.gap(y) - self._pair.gap0 + y * math.tan(self._pair.tilt_rad)


def _as_output(y: float | np.ndarray, values: np.ndarray) -> float | np.ndarray:
    return float(values) if np.ndim(y) == 0 else values


def electrode_width_profile(
    t: TransducerPair, film: FerriteFilm, y: float | np.ndarray
) -> float | np.ndarray:
    """Electrode width (cm) at aperture position y."""
    return _as_output(y, TransducerGeometry(t, film).width(y))


def current_weight(
    t: TransducerPair, film: FerriteFilm, y: float | np.ndarray
) -> float | np.ndarray:
    """Dimensionless excitation weight, 1 where the electrode has its base width."""
    return _as_output(y, TransducerGeometry(t, film).weight(y))


def gap_profile(
    t: TransducerPair, film: FerriteFilm, y: float | np.ndarray
) -> float | np.ndarray:
    """Transducer-to-transducer spacing (cm) at aperture position y."""
    return _as_output(y, TransducerGeometry(t, film).gap(y))


def validate_transducer(t: TransducerPair, film: FerriteFilm) -> None:
    """Raise ValidationError / NonPhysicalGap when the geometry cannot be built."""
    geometry = TransducerGeometry(t, film)
    geometry.gap(np.array([0.0, film.width]))


def mode_coupling(
    t: TransducerPair,
    film: FerriteFilm,
    modes: Sequence[CavityMode],
    limit: int = 10000,
) -> CouplingSpectrum:
    """
    Complex coupling c_nm of every mode, normalized to the strongest entry.

    c_nm ∝ ∫ weight(y)·sin(mπy/W)·exp(i·k_xn·phase(y)) dy, all modes integrated
    together by adaptive Gauss-Kronrod quadrature.
    """
    if not modes:
        raise InvalidArgument("mode_coupling needs at least one mode")
    geometry = TransducerGeometry(t, film)
    w = film.width
    geometry.gap(np.array([0.0, w]))  # fail fast on closed gaps

    unique: dict[tuple[int, int], CavityMode] = {}
    for mode in modes:
        unique.setdefault((mode.n, mode.m), mode)
    keys = list(unique)
    k_x = np.array([mode.k_x for mode in unique.values()])
    orders = np.array([mode.m for mode in unique.values()], dtype=float)
    points = geometry.breakpoints or None

    norm, _ = quad(lambda y: float(geometry.weight(y)), 0.0, w, points=points, limit=limit)
    epsabs = COUPLING_TOLERANCE * norm

    def integrand(y: float) -> np.ndarray:
        value = (
            geometry.weight(y)
            * np.sin(orders * math.pi * y / w)
            * np.exp(1j * k_x * geometry.phase(y))
        )
        return np.concatenate([value.real, value.imag])

    raw, err, info = quad_vec(
        integrand, 0.0, w, epsabs=epsabs, epsrel=1e-12, norm="max",
        limit=limit, points=points, full_output=True,
    )
    if info.status != 0:
        raise QuadratureFailure(
            f"coupling quadrature failed ({info.message}); error {err:.3g} > {epsabs:.3g}"
        )

    half = len(keys)
    values = raw[:half] + 1j * raw[half:]
    scale = float(np.max(np.abs(values)))
    if scale == 0:
        logger.warning("All coupling coefficients vanish; spectrum is zero")
        return CouplingSpectrum.zero(keys, weight_integral=norm)

    entries = {k: complex(v / scale) for k, v in zip(keys, values, strict=True)}
    logger.debug(
        f"Coupling {t.shape} ({len(keys)} modes): {info.intervals.shape[0]} intervals, "
        f"err {err:.2g}"
    )
    return CouplingSpectrum(entries=entries, scale=scale, weight_integral=norm)
