"""Sweeps — field sweeps, apodization grid search and variant comparisons."""

from __future__ import annotations

import itertools
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import TypeVar

import numpy as np
from loguru import logger

from app.core.cavity import enumerate_modes
from app.core.materials import resonance_bounds
from app.core.response import (
    default_frequency_grid,
    extract_metrics,
    passband_modes,
    synthesize_response,
    transmission_at,
)
from app.errors import InvalidArgument, MagnonError, NoPassband
from app.models.cavity import CavityMode
from app.models.film import BiasField, FerriteFilm
from app.models.response import (
    ComparisonRow,
    DeviceConfig,
    FilterMetrics,
    OptimizationResult,
    ScoreRow,
    SweepRow,
)
from app.models.transducer import TransducerPair, TransducerShape

GridRule = Callable[[FerriteFilm, BiasField], np.ndarray]

DEFAULT_TILTS = (0.0, 25.0, 35.0, 45.0)

_T = TypeVar("_T")
_R = TypeVar("_R")


def _map(func: Callable[[_T], _R], items: Sequence[_T], jobs: int) -> list[_R]:
    """Ordered map, optionally on a thread pool."""
    if jobs > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(func, items))
    return [func(item) for item in items]


def inclusive_range(start: float, stop: float, step: float) -> list[float]:
    """start, start+step, … up to and including stop."""
    if not step > 0:
        raise InvalidArgument("range step must be positive")
    if stop < start:
        raise InvalidArgument("range stop must not be below start")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(count)]


def _solve_modes(cfg: DeviceConfig, bias: BiasField) -> list[CavityMode]:
    s = cfg.solver
    return enumerate_modes(cfg.film, bias, s.n_max, s.m_max, s.engine, s)


def evaluate_design(
    cfg: DeviceConfig,
    bias: BiasField,
    modes: Sequence[CavityMode],
    f_grid: np.ndarray,
) -> FilterMetrics:
    """Synthesize one configuration on a fixed mode table and grid, then score it."""
    response = synthesize_response(cfg, bias, f_grid, modes=modes)
    return extract_metrics(response, passband_modes(modes))


# ── Field sweep ──


def field_sweep(
    cfg: DeviceConfig,
    h_list: Sequence[float],
    grid_rule: GridRule | None = None,
    jobs: int = 1,
) -> list[SweepRow]:
    """Metrics and band edges per bias field, in input order; failures stay in their row."""
    if not h_list:
        raise InvalidArgument("h_list must not be empty")
    if any(not h > 0 for h in h_list):
        raise InvalidArgument("every field in h_list must be positive")
    rule = grid_rule or default_frequency_grid

    def run(h0: float) -> SweepRow:
        bias = BiasField(h0)
        f_min, f_max = resonance_bounds(cfg.film, bias)
        row = SweepRow(h0=h0, f_min=f_min, f_max=f_max)
        try:
            row.metrics = evaluate_design(cfg, bias, _solve_modes(cfg, bias), rule(cfg.film, bias))
        except MagnonError as e:
            row.error = f"{type(e).__name__}: {e}"
            logger.error(f"Sweep point {h0:g} G failed: {row.error}")
        return row

    rows = _map(run, list(h_list), jobs)

    centers = [(r.h0, r.metrics.f_center) for r in rows if r.metrics]
    centers.sort()
    if any(b[1] <= a[1] for a, b in itertools.pairwise(centers)):
        logger.warning("Passband centers are not strictly increasing with the bias field")
    logger.info(f"Field sweep: {len(rows)} fields, {sum(1 for r in rows if r.error)} failed")
    return rows


# ── Apodization grid search ──


def _tapered(t: TransducerPair) -> TransducerPair:
    if t.shape == TransducerShape.STRAIGHT:
        return replace(t, shape=TransducerShape.HALF_CONE)
    return t


def optimize_apodization(
    cfg: DeviceConfig,
    hc_x_range: Sequence[float],
    hc_y_range: Sequence[float],
    bias: BiasField,
    f_grid: np.ndarray | None = None,
    jobs: int = 1,
) -> OptimizationResult:
    """
    Exhaustive (hc_x, hc_y) search maximizing spur suppression minus ripple.

    Ties go to the smaller hc_x, then the smaller hc_y. The straight-line
    baseline is scored on the same modes and grid.
    """
    if not hc_x_range or not hc_y_range:
        raise InvalidArgument("hc_x and hc_y ranges must not be empty")
    modes = _solve_modes(cfg, bias)
    grid = f_grid if f_grid is not None else default_frequency_grid(cfg.film, bias)
    base = _tapered(cfg.transducer)

    def run(point: tuple[float, float]) -> ScoreRow:
        hc_x, hc_y = point
        row = ScoreRow(hc_x=hc_x, hc_y=hc_y)
        try:
            trial = replace(cfg, transducer=replace(base, hc_x=hc_x, hc_y=hc_y))
            row.metrics = evaluate_design(trial, bias, modes, grid)
            row.score = row.metrics.spur_suppression_db - row.metrics.ripple_db
        except MagnonError as e:
            row.error = f"{type(e).__name__}: {e}"
            logger.error(f"Grid point hc_x={hc_x:g}, hc_y={hc_y:g} failed: {row.error}")
        return row

    points = [(x, y) for x in hc_x_range for y in hc_y_range]
    table = _map(run, points, jobs)

    scored = [r for r in table if r.score is not None]
    if not scored:
        raise NoPassband("no apodization grid point produced a valid response")
    best = min(scored, key=lambda r: (-r.score, r.hc_x, r.hc_y))

    straight = replace(
        base, shape=TransducerShape.STRAIGHT, hc_x=0.0, extended_asymmetry=None
    )
    baseline = evaluate_design(replace(cfg, transducer=straight), bias, modes, grid)
    logger.info(
        f"Apodization optimum hc_x={best.hc_x * 1e4:g} µm, hc_y={best.hc_y * 1e4:g} µm: "
        f"spur {best.metrics.spur_suppression_db:.1f} dB "
        f"(straight {baseline.spur_suppression_db:.1f} dB)"
    )
    return OptimizationResult(
        best=replace(base, hc_x=best.hc_x, hc_y=best.hc_y), table=table, baseline=baseline
    )


# ── Variant comparisons ──


def _compare(
    cfg: DeviceConfig,
    bias: BiasField,
    variants: list[tuple[str, TransducerPair]],
    f_grid: np.ndarray | None,
    jobs: int,
) -> list[ComparisonRow]:
    modes = _solve_modes(cfg, bias)
    grid = f_grid if f_grid is not None else default_frequency_grid(cfg.film, bias)
    primaries = passband_modes(modes)
    f_min, f_max = resonance_bounds(cfg.film, bias)
    in_band = [m for m in primaries if f_min <= m.f <= f_max]
    top = max(in_band, key=lambda m: m.n) if in_band else None

    def run(variant: tuple[str, TransducerPair]) -> ComparisonRow:
        name, pair = variant
        row = ComparisonRow(variant=name)
        try:
            trial = replace(cfg, transducer=pair)
            response = synthesize_response(trial, bias, grid, modes=modes)
            row.metrics = extract_metrics(response, primaries)
            if top is not None:
                row.top_primary_label = top.label
                row.top_primary_s21 = abs(transmission_at(response, trial, top.f))
        except MagnonError as e:
            row.error = f"{type(e).__name__}: {e}"
            logger.error(f"Variant '{name}' failed: {row.error}")
        return row

    return _map(run, variants, jobs)


def compare_shapes(
    cfg: DeviceConfig,
    bias: BiasField,
    shapes: Sequence[TransducerShape | str] = tuple(TransducerShape),
    f_grid: np.ndarray | None = None,
    jobs: int = 1,
) -> list[ComparisonRow]:
    """Same film, field and cone extents; only the electrode shape changes."""
    t = cfg.transducer
    variants: list[tuple[str, TransducerPair]] = []
    for shape in shapes:
        shape = TransducerShape(shape)
        keep = shape == TransducerShape.EXTENDED_CONE and t.shape == shape
        asym = t.extended_asymmetry if keep else None
        variants.append((str(shape), replace(t, shape=shape, extended_asymmetry=asym)))
    return _compare(cfg, bias, variants, f_grid, jobs)


def tilt_sweep(
    cfg: DeviceConfig,
    bias: BiasField,
    angles: Sequence[float] = DEFAULT_TILTS,
    f_grid: np.ndarray | None = None,
    jobs: int = 1,
) -> list[ComparisonRow]:
    """Straight electrodes over a tilted cavity, one row per angle."""
    straight = replace(
        cfg.transducer, shape=TransducerShape.STRAIGHT, extended_asymmetry=None
    )
    variants = [(f"tilt_{a:g}", replace(straight, tilt_deg=float(a))) for a in angles]
    return _compare(cfg, bias, variants, f_grid, jobs)
