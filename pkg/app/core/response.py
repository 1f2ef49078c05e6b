"""Response — electrode impedance, S-parameter synthesis and filter metrics."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import replace

import numpy as np
from loguru import logger
from scipy.optimize import brentq

from app.core.cavity import enumerate_modes
from app.core.materials import resonance_bounds
from app.core.transducer import mode_coupling
from app.data.device_config import config_digest
from app.errors import (
    DegenerateLoad,
    EmptyModeSet,
    InvalidArgument,
    NonConvergence,
    NonPositiveFrequency,
    NoPassband,
)
from app.models.cavity import CavityMode
from app.models.film import BiasField, FerriteFilm
from app.models.response import (
    DeviceConfig,
    FilterMetrics,
    FrequencyResponse,
    ModalTerm,
    SmithReport,
)
from app.models.transducer import CouplingSpectrum

NO_PASSBAND_LEVEL = 1e-6
LEVEL_FLOOR = 1e-12  # relative to the passband peak
SPUR_BAND_BELOW = 1e9  # Hz below f_min still searched for spurs
OOB_MARGIN = 1e9  # Hz beyond the band edges counted as stopband
OOB_PERCENTILE = 95.0
HALF_POWER = 1 / math.sqrt(2)  # the −3.0103 dB point that defines loaded Q


# ── Ports ──


def electrode_impedance(cfg: DeviceConfig, f: float | np.ndarray) -> complex | np.ndarray:
    """Z_s = (R + i·2πf·L) / cavities."""
    f_arr = np.asarray(f, dtype=float)
    if np.any(f_arr <= 0):
        raise NonPositiveFrequency("electrode impedance needs f > 0")
    z = (cfg.electrode_r + 2j * math.pi * f_arr * cfg.electrode_l) / cfg.cavities
    return complex(z) if np.ndim(f) == 0 else z


def reflection_coefficient(z: complex | np.ndarray, z0: float) -> complex | np.ndarray:
    """Γ = (z − z0)/(z + z0)."""
    z_arr = np.asarray(z, dtype=complex)
    if not z0 > 0:
        raise InvalidArgument("port impedance must be positive")
    if np.any(z_arr == -z0):
        raise DegenerateLoad("load equals −z0")
    if np.any(z_arr.real < 0):
        raise InvalidArgument("load must be passive (Re z >= 0)")
    gamma = (z_arr - z0) / (z_arr + z0)
    return complex(gamma) if np.ndim(z) == 0 else gamma


def mismatch_factor(z: complex | np.ndarray, z0: float) -> float | np.ndarray:
    """Delivered power fraction 1 − |Γ|²."""
    gamma = np.asarray(reflection_coefficient(z, z0))
    factor = 1.0 - np.abs(gamma) ** 2
    return float(factor) if np.ndim(z) == 0 else factor


def fit_electrode_inductance(crossover_hz: float, r: float = 3.0, z0: float = 50.0) -> float:
    """
    Series inductance that puts the single/dual-cavity crossover at ``crossover_hz``.

    Halving R + iX improves the match exactly when X² > 2·z0² − R².
    """
    if not crossover_hz > 0:
        raise NonPositiveFrequency("crossover frequency must be positive")
    x2 = 2.0 * z0 * z0 - r * r
    if x2 <= 0:
        raise InvalidArgument("with R >= √2·z0 two cavities always match better; no crossover")
    return math.sqrt(x2) / (2.0 * math.pi * crossover_hz)


def dual_cavity_crossover(cfg: DeviceConfig) -> float | None:
    """Frequency above which two parallel cavities match better; None without inductance."""
    x2 = 2.0 * cfg.port_impedance**2 - cfg.electrode_r**2
    if x2 <= 0:
        return 0.0
    if cfg.electrode_l == 0:
        return None
    return math.sqrt(x2) / (2.0 * math.pi * cfg.electrode_l)


# ── Synthesis ──


def lorentzian(f: np.ndarray, f0: np.ndarray, q: float) -> np.ndarray:
    """Unit-peak complex pole; |Λ| is −3 dB at f0 ± f0/(2q)."""
    f = np.asarray(f, dtype=float)[..., None]
    f0 = np.asarray(f0, dtype=float)
    return 1.0 / (1.0 + 2j * q * (f - f0) / f0)


def default_frequency_grid(
    film: FerriteFilm,
    bias: BiasField,
    points: int = 10000,
    span_below: float = 1.5e9,
    span_above: float = 1.5e9,
) -> np.ndarray:
    """Grid covering the band plus the spur and stopband margins."""
    if points < 2:
        raise InvalidArgument("frequency grid needs at least 2 points")
    f_min, f_max = resonance_bounds(film, bias)
    lo = max(f_min - span_below, 0.1 * f_min)
    return np.linspace(lo, f_max + span_above, points)


def _check_grid(f_grid: Sequence[float] | np.ndarray) -> np.ndarray:
    f = np.asarray(f_grid, dtype=float)
    if f.ndim != 1 or f.size < 2:
        raise InvalidArgument("f_grid needs at least 2 points")
    if not np.all(np.diff(f) > 0):
        raise InvalidArgument("f_grid must be strictly increasing")
    if f[0] <= 0:
        raise NonPositiveFrequency("f_grid must be positive")
    return f


def modal_sum(f: np.ndarray, terms: Sequence[ModalTerm], q: float) -> np.ndarray:
    """Σ |c|²·Λ over the given terms."""
    f = np.asarray(f, dtype=float)
    if not terms:
        return np.zeros(f.shape, dtype=complex)
    centers = np.array([t.f_center for t in terms])
    powers = np.array([t.power for t in terms])
    return lorentzian(f, centers, q) @ powers


def _normalization(f: np.ndarray, centers: np.ndarray, q: float) -> float:
    """Passivity scale: the largest Σ|Λ| over the grid and the mode centers."""
    samples = np.concatenate([f, centers])
    peak = 0.0
    for chunk in np.array_split(samples, max(1, samples.size // 2048)):
        peak = max(peak, float(np.abs(lorentzian(chunk, centers, q)).sum(axis=1).max()))
    return max(1.0, peak)


def synthesize_from_spectrum(
    cfg: DeviceConfig,
    modes: Sequence[CavityMode],
    spectrum: CouplingSpectrum,
    f_grid: Sequence[float] | np.ndarray,
    bias: BiasField | None = None,
) -> FrequencyResponse:
    """S21/S11 from an explicit mode list and coupling spectrum."""
    f = _check_grid(f_grid)
    solved = [m for m in modes if m.solved]
    if not solved:
        raise EmptyModeSet("no mode solved in band")
    skipped = [m.label for m in modes if not m.solved]

    q = cfg.film.q_loaded
    terms = [ModalTerm(m.label, m.n, m.m, m.f, spectrum.power(m.n, m.m)) for m in solved]
    centers = np.array([t.f_center for t in terms])
    norm = _normalization(f, centers, q)

    z = electrode_impedance(cfg, f)
    gamma = reflection_coefficient(z, cfg.port_impedance)
    mismatch = 1.0 - np.abs(gamma) ** 2
    s21 = mismatch * modal_sum(f, terms, q) / norm
    s11 = gamma * np.sqrt(np.clip(1.0 - np.abs(s21) ** 2, 0.0, None))

    f_min = f_max = None
    if bias is not None:
        f_min, f_max = resonance_bounds(cfg.film, bias)
    return FrequencyResponse(
        f_grid=f,
        s21=s21,
        s11=s11,
        config_digest=config_digest(cfg),
        terms=terms,
        normalization=norm,
        q_loaded=q,
        mismatch=mismatch,
        f_min=f_min,
        f_max=f_max,
        skipped=skipped,
        port_impedance=cfg.port_impedance,
    )


def synthesize_response(
    cfg: DeviceConfig,
    bias: BiasField,
    f_grid: Sequence[float] | np.ndarray | None = None,
    modes: Sequence[CavityMode] | None = None,
    jobs: int = 1,
) -> FrequencyResponse:
    """Enumerate modes, couple them through the transducers and synthesize the response."""
    solver = cfg.solver
    if modes is None:
        modes = enumerate_modes(
            cfg.film, bias, solver.n_max, solver.m_max, solver.engine, solver, jobs
        )
    if f_grid is None:
        f_grid = default_frequency_grid(cfg.film, bias)
    solved = [m for m in modes if m.solved]
    if not solved:
        raise EmptyModeSet(f"no mode solved in band at {bias.h0:g} G")
    spectrum = mode_coupling(cfg.transducer, cfg.film, solved, solver.quad_limit)
    response = synthesize_from_spectrum(cfg, modes, spectrum, f_grid, bias)
    logger.debug(
        f"Synthesized {cfg.transducer.shape} at {bias.h0:g} G: {len(solved)} modes, "
        f"N = {response.normalization:.3f}"
    )
    return response


def transmission_at(
    r: FrequencyResponse, cfg: DeviceConfig, f: float | np.ndarray
) -> complex | np.ndarray:
    """S21 of an already synthesized response at arbitrary frequencies."""
    f_arr = np.atleast_1d(np.asarray(f, dtype=float))
    mismatch = mismatch_factor(electrode_impedance(cfg, f_arr), cfg.port_impedance)
    s21 = mismatch * modal_sum(f_arr, r.terms, r.q_loaded) / r.normalization
    return complex(s21[0]) if np.ndim(f) == 0 else s21


def passband_modes(modes: Sequence[CavityMode]) -> list[CavityMode]:
    """The w1 family."""
    return [m for m in modes if m.m == 1 and m.solved]


# ── Metrics ──


def _half_power_edges(f: np.ndarray, mag: np.ndarray, ic: int) -> tuple[int, int, float]:
    """Indices of the contiguous −3 dB region and its interpolated width."""
    thr = mag[ic] * HALF_POWER
    below = mag < thr
    left = np.nonzero(below[:ic])[0]
    right = np.nonzero(below[ic + 1 :])[0]
    lo = int(left[-1]) + 1 if left.size else 0
    hi = ic + int(right[0]) if right.size else f.size - 1

    def crossing(i_out: int, i_in: int) -> float:
        m_out, m_in = mag[i_out], mag[i_in]
        return f[i_out] + (thr - m_out) / (m_in - m_out) * (f[i_in] - f[i_out])

    f_left = crossing(lo - 1, lo) if lo > 0 else f[0]
    f_right = crossing(hi + 1, hi) if hi < f.size - 1 else f[-1]
    return lo, hi, float(f_right - f_left)


def _db_ratio(peak: float, level: float) -> float:
    return max(0.0, 20.0 * math.log10(peak / max(level, peak * LEVEL_FLOOR)))


def extract_metrics(r: FrequencyResponse, passband: Sequence[CavityMode]) -> FilterMetrics:
    """Insertion loss, 3-dB bandwidth, spur suppression, stopband rejection and ripple."""
    f = r.f_grid
    mag = np.abs(r.s21)
    ic = int(np.argmax(mag))
    peak = float(mag[ic])
    if peak < NO_PASSBAND_LEVEL:
        raise NoPassband(f"max |S21| = {peak:.3g} below {NO_PASSBAND_LEVEL:g}")
    f_center = float(f[ic])
    il_db = max(0.0, -20.0 * math.log10(peak))
    lo, hi, bw3 = _half_power_edges(f, mag, ic)

    # spurs: everything outside the passband family, away from the passband
    window = np.abs(f - f_center) > 2.0 * bw3
    if r.has_band:
        window &= (f >= r.f_min - SPUR_BAND_BELOW) & (f <= r.f_max)
    if r.terms:
        keep = {(m.n, m.m) for m in passband}
        spurious = [t for t in r.terms if (t.n, t.m) not in keep]
        mismatch = r.mismatch if r.mismatch is not None else 1.0
        level = np.abs(mismatch * modal_sum(f, spurious, r.q_loaded) / r.normalization)
    else:
        level = mag
    if np.any(window):
        spur_db = _db_ratio(peak, float(level[window].max()))
    else:
        logger.warning("Spur window is empty; spur suppression reported as 0 dB")
        spur_db = 0.0

    # stopband floor
    if r.has_band:
        outside = (f < r.f_min - OOB_MARGIN) | (f > r.f_max + OOB_MARGIN)
    else:
        outside = np.zeros(f.shape, dtype=bool)
    if np.any(outside):
        oob_db = _db_ratio(peak, float(np.percentile(mag[outside], OOB_PERCENTILE)))
    else:
        logger.warning("No stopband points on the grid; out-of-band rejection reported as 0 dB")
        oob_db = 0.0

    region_db = 20.0 * np.log10(np.maximum(mag[lo : hi + 1], peak * LEVEL_FLOOR))
    ripple_db = float(np.max(np.abs(region_db - np.median(region_db))))

    return FilterMetrics(
        f_center=f_center,
        il_db=il_db,
        bw3_hz=bw3,
        spur_suppression_db=spur_db,
        oob_rejection_db=oob_db,
        ripple_db=ripple_db,
    )


def fit_loaded_q(
    cfg: DeviceConfig,
    bias: BiasField,
    target_bw3_hz: float,
    *,
    modes: Sequence[CavityMode] | None = None,
    f_grid: Sequence[float] | np.ndarray | None = None,
    q_bounds: tuple[float, float] = (5.0, 5000.0),
    jobs: int = 1,
) -> float:
    """
    Loaded Q at which the synthesized 3-dB bandwidth equals ``target_bw3_hz``.

    Modes and coupling are computed once; only the line width varies. The root is
    searched in log Q with Brent's method, so a bandwidth that jumps as lobes
    merge resolves to the Q at the jump.
    """
    if not target_bw3_hz > 0:
        raise InvalidArgument("target bandwidth must be positive")
    q_lo, q_hi = q_bounds
    if not 0 < q_lo < q_hi:
        raise InvalidArgument(f"q_bounds must satisfy 0 < lo < hi, got {q_bounds}")

    solver = cfg.solver
    if modes is None:
        modes = enumerate_modes(
            cfg.film, bias, solver.n_max, solver.m_max, solver.engine, solver, jobs
        )
    solved = [m for m in modes if m.solved]
    if not solved:
        raise EmptyModeSet(f"no mode solved in band at {bias.h0:g} G")
    grid = _check_grid(default_frequency_grid(cfg.film, bias) if f_grid is None else f_grid)
    spectrum = mode_coupling(cfg.transducer, cfg.film, solved, solver.quad_limit)
    passband = passband_modes(solved)

    def excess(log_q: float) -> float:
        trial = replace(cfg, film=replace(cfg.film, q_loaded=math.exp(log_q)))
        r = synthesize_from_spectrum(trial, solved, spectrum, grid, bias)
        return extract_metrics(r, passband).bw3_hz - target_bw3_hz

    lo, hi = math.log(q_lo), math.log(q_hi)
    if excess(lo) < 0 or excess(hi) > 0:
        raise NonConvergence(
            f"a {target_bw3_hz / 1e6:g} MHz bandwidth is not reachable for Q in {q_bounds}"
        )
    q = math.exp(brentq(excess, lo, hi, xtol=1e-9))
    logger.info(f"Fitted loaded Q = {q:.4g} for bw3 = {target_bw3_hz / 1e6:g} MHz at {bias.h0:g} G")
    return q


def smith_report(r: FrequencyResponse) -> SmithReport:
    """Input reflection and impedance at the minimum-insertion-loss frequency."""
    ic = int(np.argmax(np.abs(r.s21)))
    gamma = complex(r.s11[ic])
    if gamma == 1:
        z_norm = complex(math.inf, 0)
    else:
        z_norm = (1 + gamma) / (1 - gamma)
    return SmithReport(
        f_hz=float(r.f_grid[ic]),
        gamma=gamma,
        z_norm=z_norm,
        z_ohm=z_norm * r.port_impedance,
        mismatch=1.0 - abs(gamma) ** 2,
    )
