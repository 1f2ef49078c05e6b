"""Materials — permeability tensor and MSSW band edges of the magnetized film."""

from __future__ import annotations

import math

from app.errors import (
    InvalidArgument,
    NonPositiveField,
    NonPositiveFrequency,
    SingularPermeability,
)
from app.models.film import BiasField, FerriteFilm, PermeabilityTensor

_SINGULAR_RTOL = 1e-12

FREE_SPACE = PermeabilityTensor(mu1=1.0, mu2=0.0, omega_norm=math.inf, omega_h=0.0)


def require_field(bias: BiasField) -> float:
    """Return h0, rejecting non-positive bias."""
    if not bias.h0 > 0:
        raise NonPositiveField(f"h0 must be positive, got {bias.h0}")
    return bias.h0


def permeability(film: FerriteFilm, bias: BiasField, f: float) -> PermeabilityTensor:
    """
    Lossless tensor components inside the film.

    mu2 keeps the Ω_H numerator as written for this model; nothing downstream
    consumes it.
    """
    if not f > 0:
        raise NonPositiveFrequency(f"f must be positive, got {f}")
    h0 = require_field(bias)
    omega = f / (film.gamma * film.b_sat)
    omega_h = h0 / film.b_sat
    denom = omega * omega - omega_h * omega_h
    if abs(denom) <= _SINGULAR_RTOL * max(omega * omega, omega_h * omega_h):
        raise SingularPermeability(f"mu1 is singular at f = {f:.6g} Hz (Ω = Ω_H)")
    return PermeabilityTensor(
        mu1=1.0 - omega_h / denom,
        mu2=omega_h / denom,
        omega_norm=omega,
        omega_h=omega_h,
    )


def resonance_bounds(film: FerriteFilm, bias: BiasField) -> tuple[float, float]:
    """(f_min, f_max) of the surface-wave band in Hz."""
    h0 = require_field(bias)
    base = h0 * (h0 + film.b_sat)
    f_min = film.gamma * math.sqrt(base)
    f_max = film.gamma * math.sqrt(base + film.b_sat * film.b_sat / 4.0)
    return f_min, f_max


def field_for_min_frequency(film: FerriteFilm, f_target: float) -> float:
    """Bias (G) whose uniform-resonance frequency equals ``f_target``."""
    if not f_target > 0:
        raise NonPositiveFrequency(f"f must be positive, got {f_target}")
    r = f_target / film.gamma
    b = film.b_sat
    # positive root of h² + b·h − r² = 0, written to avoid cancellation
    return 2.0 * r * r / (b + math.sqrt(b * b + 4.0 * r * r))


def tuning_range(film: FerriteFilm, h_low: float, h_high: float) -> tuple[float, float]:
    """Lowest f_min and highest f_max reachable between two bias fields."""
    if h_low > h_high:
        raise InvalidArgument("h_low must not exceed h_high")
    f_low, _ = resonance_bounds(film, BiasField(h_low))
    _, f_high = resonance_bounds(film, BiasField(h_high))
    return f_low, f_high
