"""Device configuration, synthesized responses and figures of merit."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from app.errors import InvalidArgument, ValidationError
from app.models.dispersion import EngineName
from app.models.film import FerriteFilm
from app.models.transducer import TransducerPair, TransducerShape

# Declared fit: dual/single-cavity crossover at 15.75 GHz with r = 3 Ω, z0 = 50 Ω
DEFAULT_ELECTRODE_L = 7.138934e-10  # H


@dataclass(frozen=True)
class SolverSettings:
    """Numerical knobs shared by the dispersion, cavity and transducer modules."""

    engine: EngineName = EngineName.KS
    n_max: int = 10
    m_max: int = 7
    scan_points: int = 4096
    max_iter: int = 200
    tol_hz: float = 1.0
    quad_limit: int = 10000

    def __post_init__(self) -> None:
        object.__setattr__(self, "engine", EngineName.parse(self.engine))
        if self.n_max < 1 or self.m_max < 1:
            raise ValidationError("n_max and m_max must be at least 1")
        if self.scan_points < 2:
            raise ValidationError("scan_points must be at least 2")
        if self.max_iter < 1:
            raise ValidationError("max_iter must be at least 1")
        if not self.tol_hz > 0:
            raise ValidationError("tol_hz must be positive")
        if self.quad_limit < 1:
            raise ValidationError("quad_limit must be at least 1")


@dataclass(frozen=True)
class DeviceConfig:
    """Complete filter description: film, transducers, ports and solver settings."""

    film: FerriteFilm = field(default_factory=FerriteFilm)
    transducer: TransducerPair = field(default_factory=TransducerPair)
    cavities: int = 1
    port_impedance: float = 50.0
    electrode_r: float = 3.0
    electrode_l: float = DEFAULT_ELECTRODE_L
    solver: SolverSettings = field(default_factory=SolverSettings)

    def __post_init__(self) -> None:
        if self.cavities not in (1, 2):
            raise ValidationError("cavities must be 1 or 2")
        if not self.port_impedance > 0:
            raise ValidationError("port_impedance must be positive")
        if not self.electrode_r >= 0:
            raise ValidationError("electrode_r must be non-negative")
        if not self.electrode_l >= 0:
            raise ValidationError("electrode_l must be non-negative")
        t = self.transducer
        half = self.film.width / 2
        if t.hc_y > half:
            raise ValidationError("hc_y must not exceed W/2")
        if t.shape == TransducerShape.EXTENDED_CONE and t.hc_y + t.extended_asymmetry > half:
            raise ValidationError("hc_y + extended_asymmetry must not exceed W/2")


@dataclass(frozen=True)
class ModalTerm:
    """One mode's contribution to the synthesized transmission."""

    label: str
    n: int
    m: int
    f_center: float
    power: float  # |c_nm|²


@dataclass
class FrequencyResponse:
    """Sampled two-port response on a strictly increasing grid."""

    f_grid: np.ndarray
    s21: np.ndarray
    s11: np.ndarray
    config_digest: str = ""
    terms: list[ModalTerm] = field(default_factory=list)
    normalization: float = 1.0
    q_loaded: float = 0.0
    mismatch: np.ndarray | None = None
    f_min: float | None = None
    f_max: float | None = None
    skipped: list[str] = field(default_factory=list)
    port_impedance: float = 50.0

    def __post_init__(self) -> None:
        self.f_grid = np.asarray(self.f_grid, dtype=float)
        self.s21 = np.asarray(self.s21, dtype=complex)
        self.s11 = np.asarray(self.s11, dtype=complex)
        if self.f_grid.ndim != 1 or self.f_grid.size < 2:
            raise InvalidArgument("f_grid needs at least 2 points")
        if not np.all(np.diff(self.f_grid) > 0):
            raise InvalidArgument("f_grid must be strictly increasing")
        if self.s21.shape != self.f_grid.shape or self.s11.shape != self.f_grid.shape:
            raise InvalidArgument("S-parameter arrays must match the frequency grid")

    @property
    def s21_db(self) -> np.ndarray:
        return 20.0 * np.log10(np.maximum(np.abs(self.s21), 1e-300))

    @property
    def has_band(self) -> bool:
        return self.f_min is not None and self.f_max is not None


@dataclass(frozen=True)
class FilterMetrics:
    """Scalar figures of merit (dB and Hz)."""

    f_center: float
    il_db: float
    bw3_hz: float
    spur_suppression_db: float
    oob_rejection_db: float
    ripple_db: float = 0.0


@dataclass
class SweepRow:
    """One bias point of a field sweep; ``metrics`` is None when the point failed."""

    h0: float
    f_min: float
    f_max: float
    metrics: FilterMetrics | None = None
    error: str = ""


@dataclass
class ScoreRow:
    """One apodization grid point."""

    hc_x: float
    hc_y: float
    metrics: FilterMetrics | None = None
    score: float | None = None
    error: str = ""


@dataclass
class OptimizationResult:
    best: TransducerPair
    table: list[ScoreRow]
    baseline: FilterMetrics


@dataclass
class ComparisonRow:
    """Metrics of one transducer variant (shape or tilt)."""

    variant: str
    metrics: FilterMetrics | None = None
    top_primary_label: str = ""
    top_primary_s21: float = 0.0
    error: str = ""


@dataclass(frozen=True)
class SmithReport:
    """Input reflection at the minimum-insertion-loss frequency."""

    f_hz: float
    gamma: complex
    z_norm: complex
    z_ohm: complex
    mismatch: float
