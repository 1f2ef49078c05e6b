"""Dispersion — dipole-exchange, surface-wave oracle and width-mode solvers."""

from __future__ import annotations

import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from loguru import logger
from scipy.optimize import bisect

from app.core.materials import permeability, require_field, resonance_bounds
from app.errors import (
    InvalidArgument,
    MagnonError,
    NegativeArgument,
    NegativeRadicand,
    NoSolutionInBand,
    NonConvergence,
    SingularPermeability,
)
from app.models.dispersion import (
    DispersionPoint,
    EngineName,
    OrderingOutcome,
    PointStatus,
    WidthOrderingReport,
)
from app.models.film import BiasField, FerriteFilm

SERIES_CUTOFF = 1e-4
BRACKET_EPS = 1e-6

ORDERING_DISCREPANCY = (
    "known discrepancy: the dipole-exchange relation with the k_ym²/k_z² term as printed "
    "does not reproduce the width-mode ordering (open question on a dropped "
    "propagation-angle factor); mode tables and responses use the '{engine}' engine"
)


# ── Closed forms ──


def reduction_factor(x: float) -> float:
    """P(x) = 1 − (1 − e^−x)/x, series below 1e-4."""
    if x < 0:
        raise NegativeArgument(f"reduction factor needs x >= 0, got {x}")
    if x < SERIES_CUTOFF:
        return x / 2.0 - x * x / 6.0
    return 1.0 + math.expm1(-x) / x


def _reduction_factor_array(x: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        exact = 1.0 + np.expm1(-x) / x
    return np.where(x < SERIES_CUTOFF, x / 2.0 - x * x / 6.0, exact)


def width_wavenumber(film: FerriteFilm, m: int) -> float:
    """k_ym = mπ/W (rad/cm)."""
    return m * math.pi / film.width


def outside_wavenumber(film: FerriteFilm, k_x: float, m: int) -> float:
    """Total wavenumber outside the film: √(k_x² + (mπ/W)²). Diagnostic only."""
    k_ym = width_wavenumber(film, m)
    return math.hypot(k_x, k_ym)


def inside_wavenumber(film: FerriteFilm, bias: BiasField, k_x: float, m: int, f: float) -> float:
    """k_z inside the film: √(k_x² + (mπ/W)²/mu1(f)); requires mu1 > 0."""
    mu1 = permeability(film, bias, f).mu1
    if mu1 <= 0:
        raise NegativeRadicand(f"mu1 = {mu1:.3g} <= 0 at f = {f:.6g} Hz")
    k_ym = width_wavenumber(film, m)
    return math.sqrt(k_x * k_x + k_ym * k_ym / mu1)


def dipole_exchange_frequency(
    film: FerriteFilm, bias: BiasField, k_x: float, k_ym: float, k_z: float
) -> float:
    """Pure evaluation of the dipole-exchange relation (no self-consistency)."""
    h0 = require_field(bias)
    if k_x < 0 or k_ym < 0 or k_z < 0:
        raise InvalidArgument("wavenumbers must be non-negative")
    if k_z > 0 and (k_x > k_z * (1 + 1e-12) or k_ym > k_z * (1 + 1e-12)):
        raise InvalidArgument("k_z must bound both k_x and k_ym")
    b = film.b_sat
    p = reduction_factor(k_z * film.thickness)
    ratio = (k_ym * k_ym) / (k_z * k_z) if k_z > 0 else 0.0
    exchange = film.exch * k_z * k_z
    first = h0 + b * (1.0 - p + exchange)
    second = h0 + b * (p * ratio + exchange)
    if first <= 0 or second <= 0:
        raise NegativeRadicand(f"non-positive bracket ({first:.6g}, {second:.6g})")
    return film.gamma * math.sqrt(first * second)


def de_surface_frequency(film: FerriteFilm, bias: BiasField, k_x: float) -> float:
    """Band-anchored surface-wave oracle, f_min at k_x = 0 and f_max as k_x·T → ∞."""
    h0 = require_field(bias)
    if k_x < 0:
        raise NegativeArgument(f"k_x must be non-negative, got {k_x}")
    b = film.b_sat
    decay = -math.expm1(-2.0 * k_x * film.thickness)
    return film.gamma * math.sqrt(h0 * (h0 + b) + b * b / 4.0 * decay)


def ks_frequency(film: FerriteFilm, bias: BiasField, k_x: float, k_y: float) -> float:
    """
    In-plane dipole-exchange frequency for an arbitrary propagation angle.

    Magnetization lies along y (the bias); φ is the angle between the wavevector
    and the magnetization, so sin²φ = k_x²/k². Lowest unpinned thickness mode.
    """
    h0 = require_field(bias)
    if k_x < 0 or k_y < 0:
        raise NegativeArgument("wavenumbers must be non-negative")
    b = film.b_sat
    k2 = k_x * k_x + k_y * k_y
    if k2 == 0:
        return film.gamma * math.sqrt(h0 * (h0 + b))
    p = reduction_factor(math.sqrt(k2) * film.thickness)
    sin2 = k_x * k_x / k2
    cos2 = 1.0 - sin2
    h_k = h0 + b * film.exch * k2
    shape = p + sin2 * (1.0 - p * (1.0 + cos2) + b * p * (1.0 - p) * sin2 / h_k)
    return film.gamma * math.sqrt(h_k * (h_k + b * shape))


# ── Self-consistent width-mode solve ──


def _residual(
    film: FerriteFilm, h0: float, k_x: float, k_ym: float, f: np.ndarray | float
) -> np.ndarray:
    """g(f) = f − Eq13(k_z(f)), vectorized over f inside the band."""
    f = np.asarray(f, dtype=float)
    b = film.b_sat
    omega = f / (film.gamma * b)
    omega_h = h0 / b
    mu1 = 1.0 - omega_h / (omega * omega - omega_h * omega_h)
    k_z2 = k_x * k_x + k_ym * k_ym / mu1
    p = _reduction_factor_array(np.sqrt(k_z2) * film.thickness)
    exchange = film.exch * k_z2
    first = h0 + b * (1.0 - p + exchange)
    second = h0 + b * (p * k_ym * k_ym / k_z2 + exchange)
    return f - film.gamma * np.sqrt(first * second)


def mode_residual(film: FerriteFilm, bias: BiasField, k_x: float, m: int, f: float) -> float:
    """Self-consistency residual in Hz at a single frequency."""
    h0 = require_field(bias)
    inside_wavenumber(film, bias, k_x, m, f)  # validates mu1 > 0
    return float(_residual(film, h0, k_x, width_wavenumber(film, m), f))


def _mode_bracket(film: FerriteFilm, bias: BiasField) -> tuple[float, float]:
    f_min, f_max = resonance_bounds(film, bias)
    return f_min * (1 + BRACKET_EPS), f_max * (1 - BRACKET_EPS)


def _check_mode_args(k_x: float, m: int) -> None:
    if not k_x > 0:
        raise InvalidArgument(f"k_x must be positive, got {k_x}")
    if m < 1:
        raise InvalidArgument(f"width order must be >= 1, got {m}")


def solve_mode_frequency(
    film: FerriteFilm,
    bias: BiasField,
    k_x: float,
    m: int,
    *,
    scan_points: int = 4096,
    max_iter: int = 200,
    tol_hz: float = 1.0,
) -> DispersionPoint:
    """
    Lowest in-band root of the width-mode self-consistency loop.

    The bracket is scanned on ``scan_points`` cells; the first sign change is
    refined by bisection and the root must satisfy |g| < ``tol_hz``.
    """
    _check_mode_args(k_x, m)
    h0 = require_field(bias)
    k_ym = width_wavenumber(film, m)
    lo, hi = _mode_bracket(film, bias)

    grid = np.linspace(lo, hi, scan_points + 1)
    values = _residual(film, h0, k_x, k_ym, grid)
    signs = np.sign(values)
    exact = np.nonzero(signs == 0)[0]
    changes = np.nonzero(signs[:-1] * signs[1:] < 0)[0]
    if exact.size == 0 and changes.size == 0:
        raise NoSolutionInBand(
            f"no root for k_x={k_x:g} rad/cm, m={m} in ({lo:.6g}, {hi:.6g}) Hz"
        )

    if exact.size and (changes.size == 0 or exact[0] <= changes[0]):
        root = float(grid[exact[0]])
    else:
        i = int(changes[0])

        def g(x: float) -> float:
            return float(_residual(film, h0, k_x, k_ym, x))

        try:
            root, info = bisect(
                g, grid[i], grid[i + 1], xtol=1e-4, maxiter=max_iter,
                full_output=True, disp=False,
            )
        except RuntimeError as e:
            raise NonConvergence(f"bisection failed for k_x={k_x:g}, m={m}: {e}") from e
        if not info.converged:
            raise NonConvergence(f"bisection did not converge in {max_iter} steps")
        root = float(root)

    residual = float(_residual(film, h0, k_x, k_ym, root))
    if abs(residual) >= tol_hz:
        raise NonConvergence(f"|g| = {abs(residual):.3g} Hz at the bracketed root")

    k_z = inside_wavenumber(film, bias, k_x, m, root)
    return DispersionPoint(k_x=k_x, m=m, f=root, k_z=k_z, engine=EngineName.PAPER)


def fixed_point_mode_frequency(
    film: FerriteFilm,
    bias: BiasField,
    k_x: float,
    m: int,
    *,
    f_start: float | None = None,
    damping: float = 0.5,
    max_iter: int = 200,
    tol_hz: float = 1.0,
) -> DispersionPoint:
    """
    Damped fixed-point iteration f ← (1−d)·f + d·Eq13(k_z(f)).

    Cross-check for the bisection solver; converges to the attracting root,
    which need not be the lowest one.
    """
    _check_mode_args(k_x, m)
    h0 = require_field(bias)
    k_ym = width_wavenumber(film, m)
    lo, hi = _mode_bracket(film, bias)
    f = f_start if f_start is not None else 0.5 * (lo + hi)

    for step in range(max_iter):
        if not lo <= f <= hi:
            raise NonConvergence(f"fixed-point iterate left the band at step {step}")
        g = float(_residual(film, h0, k_x, k_ym, f))
        if abs(g) < tol_hz:
            k_z = inside_wavenumber(film, bias, k_x, m, f)
            return DispersionPoint(k_x=k_x, m=m, f=f, k_z=k_z, engine=EngineName.PAPER)
        f -= damping * g
    raise NonConvergence(f"fixed-point iteration did not settle in {max_iter} steps")


# ── Curves ──


def engine_point(
    film: FerriteFilm, bias: BiasField, k_x: float, m: int, engine: EngineName | str
) -> DispersionPoint:
    """Evaluate one point with the named engine, turning failures into gap markers."""
    from app.plugins.plugin_manager import get_plugin_manager

    plugin = get_plugin_manager().get_engine(engine)
    try:
        return plugin.evaluate(film, bias, k_x, m)
    except NoSolutionInBand as e:
        status, reason = PointStatus.GAP, str(e)
    except (NonConvergence, SingularPermeability, NegativeRadicand) as e:
        status, reason = PointStatus.FAILED, str(e)
    logger.debug(f"{plugin.name} k_x={k_x:g} m={m}: {status} ({reason})")
    return DispersionPoint(
        k_x=k_x, m=m, f=None, k_z=None, engine=plugin.tag, status=status, reason=reason
    )


def dispersion_curve(
    film: FerriteFilm,
    bias: BiasField,
    m: int,
    k_grid: Sequence[float],
    engine: EngineName | str = EngineName.PAPER,
    jobs: int = 1,
) -> list[DispersionPoint]:
    """One point per grid entry; unsolved points are gap markers, never interpolated."""
    engine = EngineName.parse(engine)
    require_field(bias)
    if m < 0:
        raise InvalidArgument(f"width order must be >= 0, got {m}")
    if engine == EngineName.DE_ORACLE and m != 0:
        raise InvalidArgument("the de-oracle engine is only valid for m = 0")
    ks = [float(k) for k in k_grid]
    if any(k < 0 for k in ks):
        raise InvalidArgument("k_grid entries must be non-negative")
    if any(b <= a for a, b in zip(ks, ks[1:], strict=False)):
        raise InvalidArgument("k_grid must be strictly increasing")
    if not ks:
        return []

    def run(k_x: float) -> DispersionPoint:
        return engine_point(film, bias, k_x, m, engine)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            points = list(pool.map(run, ks))
    else:
        points = [run(k) for k in ks]

    gaps = sum(1 for p in points if p.is_gap)
    logger.debug(f"Dispersion curve m={m} ({engine}): {len(points)} points, {gaps} gaps")
    return points


def width_ordering_report(
    film: FerriteFilm,
    bias: BiasField,
    k_values: Sequence[float] = (100.0, 300.0, 600.0),
    orders: Sequence[int] = (1, 2, 3, 4, 5),
    engine: EngineName | str = EngineName.PAPER,
    synthesis_engine: EngineName | str = EngineName.KS,
) -> WidthOrderingReport:
    """
    Check that frequency falls with width order at each k_x and record the outcome.

    Any outcome other than ``ordered`` carries the known-discrepancy note.
    """
    engine = EngineName.parse(engine)
    report = WidthOrderingReport(h0=require_field(bias), engine=engine)
    violated = unsolved = False

    for k_x in k_values:
        row: list[DispersionPoint] = []
        for m in orders:
            try:
                point = engine_point(film, bias, k_x, m, engine)
            except MagnonError as e:
                point = DispersionPoint(
                    k_x=k_x, m=m, f=None, k_z=None, engine=engine,
                    status=PointStatus.FAILED, reason=str(e),
                )
            row.append(point)
        report.points.extend(row)
        if any(p.is_gap for p in row):
            unsolved = True
            continue
        freqs = [p.f for p in row]
        if any(b >= a for a, b in zip(freqs, freqs[1:], strict=False)):
            violated = True

    if violated:
        report.outcome = OrderingOutcome.VIOLATED
    elif unsolved:
        report.outcome = OrderingOutcome.UNSOLVED
    if report.outcome != OrderingOutcome.ORDERED:
        report.discrepancy = ORDERING_DISCREPANCY.format(
            engine=EngineName.parse(synthesis_engine)
        )
        logger.warning(f"Width ordering at {report.h0:g} G ({engine}): {report.outcome}")
        logger.warning(report.discrepancy)
    else:
        logger.info(f"Width ordering at {report.h0:g} G ({engine}): ordered")
    return report
