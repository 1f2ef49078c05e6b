"""Command-line entry point — parses display-unit flags and dispatches toolkit commands."""

from __future__ import annotations

import argparse
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any

import numpy as np
from loguru import logger

from app import __version__
from app.config import get_config
from app.context import AppContext
from app.core.cavity import enumerate_modes
from app.core.dispersion import dispersion_curve, width_ordering_report
from app.core.export import (
    build_manifest,
    comparison_table,
    dispersion_table,
    export_csv,
    export_json,
    export_touchstone,
    modes_table,
    response_table,
    score_table,
    sweep_table,
    write_manifest,
)
from app.core.materials import field_for_min_frequency, resonance_bounds
from app.core.response import (
    default_frequency_grid,
    dual_cavity_crossover,
    extract_metrics,
    passband_modes,
    smith_report,
    synthesize_response,
)
from app.core.sweep import (
    compare_shapes,
    field_sweep,
    inclusive_range,
    optimize_apodization,
    tilt_sweep,
)
from app.data.device_config import device_config_from_dict, device_config_to_dict
from app.data.device_config import parse_device_config as load_config_file
from app.errors import InvalidArgument, MagnonError
from app.logger import setup_logger
from app.models.dispersion import EngineName
from app.models.film import UM, BiasField
from app.models.response import DeviceConfig
from app.models.transducer import TransducerShape
from app.plugins.plugin_manager import get_plugin_manager

GHZ = 1e9

CommandFunc = Callable[[AppContext, argparse.Namespace], list[Path]]

# Flags that never change results and stay out of the manifest digest
_RUNTIME_FLAGS = {"func", "jobs", "log_dir", "verbose", "command"}


# ── Argument types ──


def _float_list(text: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from e
    if not values:
        raise argparse.ArgumentTypeError("list must not be empty")
    return values


def _int_spec(text: str) -> list[int]:
    """``1,3,5`` or the inclusive range ``1:5``."""
    try:
        if ":" in text:
            lo, hi = (int(part) for part in text.split(":", 1))
            values = list(range(lo, hi + 1))
        else:
            values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected a list or range of integers: {text!r}") from e
    if not values:
        raise argparse.ArgumentTypeError(f"empty integer selection: {text!r}")
    return values


def _range_spec(text: str) -> tuple[float, float, float]:
    """``start:stop:step`` in display units."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"bad range {text!r}") from e
    if step <= 0 or stop < start:
        raise argparse.ArgumentTypeError(f"range {text!r} needs step > 0 and stop >= start")
    return start, stop, step


def _shape_list(text: str) -> list[TransducerShape]:
    try:
        return [TransducerShape(part.strip()) for part in text.split(",") if part.strip()]
    except ValueError as e:
        choices = ", ".join(TransducerShape)
        raise argparse.ArgumentTypeError(f"shapes must be among: {choices}") from e


# ── Helpers ──


def _device(args: argparse.Namespace) -> DeviceConfig:
    if getattr(args, "config", None):
        return load_config_file(Path(args.config))
    return device_config_from_dict({})


def _grid_rule(ctx: AppContext) -> Callable[..., np.ndarray]:
    cfg = ctx.config

    def rule(film: Any, bias: BiasField) -> np.ndarray:
        return default_frequency_grid(
            film, bias, cfg.grid_points, cfg.grid_span_below, cfg.grid_span_above
        )

    return rule


def _display_inputs(args: argparse.Namespace) -> dict[str, Any]:
    inputs: dict[str, Any] = {}
    for key, value in sorted(vars(args).items()):
        if key in _RUNTIME_FLAGS or value is None:
            continue
        if isinstance(value, Path):
            value = value.as_posix()
        elif isinstance(value, list | tuple):
            value = [str(v) if isinstance(v, TransducerShape) else v for v in value]
        inputs[key] = value
    return inputs


def _finish(
    args: argparse.Namespace, cfg: DeviceConfig, primary: Path, outputs: list[Path]
) -> list[Path]:
    manifest = build_manifest(
        args.command, device_config_to_dict(cfg), _display_inputs(args), outputs
    )
    write_manifest(manifest, primary)
    return outputs


# ── Commands ──


def cmd_dispersion(ctx: AppContext, args: argparse.Namespace) -> list[Path]:
    cfg = _device(args)
    bias = BiasField(args.h0)
    k_grid = np.linspace(args.k_min, args.k_max, args.k_steps)
    points = []
    for m in args.m:
        points.extend(dispersion_curve(cfg.film, bias, m, k_grid, args.engine, ctx.jobs))
    out = Path(args.out)
    export_csv(dispersion_table(points), out)
    gaps = sum(1 for p in points if p.is_gap)
    logger.info(f"Dispersion: {len(points)} points ({gaps} gaps) → {out}")
    return _finish(args, cfg, out, [out])


def cmd_modes(ctx: AppContext, args: argparse.Namespace) -> list[Path]:
    cfg = _device(args)
    s = cfg.solver
    modes = enumerate_modes(
        cfg.film,
        BiasField(args.h0),
        args.n_max or s.n_max,
        args.m_max or s.m_max,
        args.engine or s.engine,
        s,
        ctx.jobs,
    )
    out = Path(args.out)
    export_csv(modes_table(modes), out)
    logger.info(f"Modes: {sum(1 for m in modes if m.solved)}/{len(modes)} solved → {out}")
    return _finish(args, cfg, out, [out])


def cmd_response(ctx: AppContext, args: argparse.Namespace) -> list[Path]:
    cfg = _device(args)
    bias = BiasField(args.h0)
    points = args.points or ctx.config.grid_points
    if args.f_start is not None and args.f_stop is not None:
        f_grid = np.linspace(args.f_start * GHZ, args.f_stop * GHZ, points)
    else:
        f_grid = default_frequency_grid(
            cfg.film, bias, points, ctx.config.grid_span_below, ctx.config.grid_span_above
        )
    s = cfg.solver
    modes = enumerate_modes(cfg.film, bias, s.n_max, s.m_max, s.engine, s, ctx.jobs)
    response = synthesize_response(cfg, bias, f_grid, modes=modes)
    metrics = extract_metrics(response, passband_modes(modes))

    out = Path(args.out)
    outputs = [out]
    export_csv(response_table(response), out)
    if args.touchstone:
        export_touchstone(response, Path(args.touchstone))
        outputs.append(Path(args.touchstone))
    if args.smith:
        report = smith_report(response)
        export_json(
            {
                "f_hz": report.f_hz,
                "gamma": report.gamma,
                "z_norm": report.z_norm,
                "z_ohm": report.z_ohm,
                "mismatch": report.mismatch,
                "dual_cavity_crossover_hz": dual_cavity_crossover(cfg),
            },
            Path(args.smith),
        )
        outputs.append(Path(args.smith))
    logger.info(
        f"Response at {bias.h0:g} G: f_center {metrics.f_center / GHZ:.4f} GHz, "
        f"IL {metrics.il_db:.2f} dB, BW3 {metrics.bw3_hz / 1e6:.1f} MHz, "
        f"spur {metrics.spur_suppression_db:.1f} dB"
    )
    return _finish(args, cfg, out, outputs)


def cmd_sweep(ctx: AppContext, args: argparse.Namespace) -> list[Path]:
    cfg = _device(args)
    rows = field_sweep(cfg, args.h0_list, _grid_rule(ctx), ctx.jobs)
    out = Path(args.out)
    export_csv(sweep_table(rows), out)
    return _finish(args, cfg, out, [out])


def cmd_optimize(ctx: AppContext, args: argparse.Namespace) -> list[Path]:
    cfg = _device(args)
    bias = BiasField(args.h0)
    hc_x = [v * UM for v in inclusive_range(*args.hcx)]
    hc_y = [v * UM for v in inclusive_range(*args.hcy)]
    result = optimize_apodization(
        cfg, hc_x, hc_y, bias, _grid_rule(ctx)(cfg.film, bias), ctx.jobs
    )
    out = Path(args.out)
    export_csv(score_table(result.table), out)
    best_path = out.with_name(out.stem + ".best.json")
    key = (result.best.hc_x, result.best.hc_y)
    best = next(r for r in result.table if (r.hc_x, r.hc_y) == key)
    export_json(
        {
            "hc_x_um": round(result.best.hc_x / UM, 9),
            "hc_y_um": round(result.best.hc_y / UM, 9),
            "score_db": best.score,
            "spur_suppression_db": best.metrics.spur_suppression_db,
            "straight_spur_suppression_db": result.baseline.spur_suppression_db,
        },
        best_path,
    )
    return _finish(args, cfg, out, [out, best_path])


def cmd_compare(ctx: AppContext, args: argparse.Namespace) -> list[Path]:
    cfg = _device(args)
    bias = BiasField(args.h0)
    rows = compare_shapes(cfg, bias, args.shapes, _grid_rule(ctx)(cfg.film, bias), ctx.jobs)
    out = Path(args.out)
    export_csv(comparison_table(rows), out)
    return _finish(args, cfg, out, [out])


def cmd_tilt(ctx: AppContext, args: argparse.Namespace) -> list[Path]:
    cfg = _device(args)
    bias = BiasField(args.h0)
    rows = tilt_sweep(cfg, bias, args.angles, _grid_rule(ctx)(cfg.film, bias), ctx.jobs)
    out = Path(args.out)
    export_csv(comparison_table(rows), out)
    return _finish(args, cfg, out, [out])


def cmd_bounds(ctx: AppContext, args: argparse.Namespace) -> list[Path]:
    cfg = _device(args)
    f_min, f_max = resonance_bounds(cfg.film, BiasField(args.h0))
    data: dict[str, Any] = {"h0_gauss": args.h0, "f_min_hz": f_min, "f_max_hz": f_max}
    if args.target_ghz is not None:
        data["target_f_min_hz"] = args.target_ghz * GHZ
        data["field_for_target_gauss"] = field_for_min_frequency(cfg.film, args.target_ghz * GHZ)
    out = Path(args.out)
    export_json(data, out)
    logger.info(f"Band at {args.h0:g} G: {f_min / GHZ:.6f} to {f_max / GHZ:.6f} GHz")
    return _finish(args, cfg, out, [out])


def cmd_ordering(ctx: AppContext, args: argparse.Namespace) -> list[Path]:
    cfg = _device(args)
    report = width_ordering_report(
        cfg.film,
        BiasField(args.h0),
        args.k_values,
        args.orders,
        args.engine,
        cfg.solver.engine,
    )
    out = Path(args.out)
    export_json(
        {
            "h0_gauss": report.h0,
            "engine": str(report.engine),
            "outcome": str(report.outcome),
            "discrepancy": report.discrepancy,
            "points": [
                {
                    "k_x_rad_per_cm": p.k_x,
                    "m": p.m,
                    "f_hz": p.f,
                    "status": str(p.status),
                    "reason": p.reason,
                }
                for p in report.points
            ],
        },
        out,
    )
    return _finish(args, cfg, out, [out])


_LEVELS = ("TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL")


def _flag(text: str) -> bool:
    value = text.strip().lower()
    if value in {"1", "true", "yes", "on"}:
        return True
    if value in {"0", "false", "no", "off"}:
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _level(text: str) -> str:
    value = text.strip().upper()
    if value not in _LEVELS:
        raise ValueError(f"unknown log level: {text!r}")
    return value


_SETTINGS: dict[str, Callable[[str], Any]] = {
    "jobs": int,
    "log_level": _level,
    "log_to_file": _flag,
    "grid.points": int,
    "grid.span_below_hz": float,
    "grid.span_above_hz": float,
}


def cmd_settings(ctx: AppContext, args: argparse.Namespace) -> list[Path]:
    """Show the user settings, applying any ``--set key=value`` first."""
    config = ctx.config
    updates: dict[str, Any] = {}
    for item in args.set or []:
        key, sep, raw = item.partition("=")
        key = key.strip()
        if not sep or key not in _SETTINGS:
            raise InvalidArgument(f"expected one of {', '.join(_SETTINGS)} as key=value: {item!r}")
        try:
            updates[key] = _SETTINGS[key](raw.strip())
        except ValueError as e:
            raise InvalidArgument(f"bad value for {key}: {e}") from e

    if updates:
        with config.batch_update():
            for key, value in updates.items():
                config.set(key, value)
    for key in _SETTINGS:
        logger.info(f"{key} = {config.get(key)}")
    return [config.data_dir / "settings.json"] if updates else []


# ── Parser ──


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="magnon-filter",
        description="YIG MSSW cavity filter design toolkit (Gauss, µm, GHz on the command line).",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--jobs", type=int, default=None, help="worker threads (env MAGNON_JOBS)")
    parser.add_argument("--log-dir", type=Path, default=None, help="also log to this directory")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)
    engines = ["paper", "de", "de-oracle", "ks"]

    def command(name: str, func: CommandFunc, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        return p

    def with_config(p: argparse.ArgumentParser, h0_required: bool = True) -> None:
        p.add_argument("--config", type=Path, default=None, help="device config JSON")
        if h0_required:
            p.add_argument("--h0", type=float, required=True, help="bias field, Gauss")
        p.add_argument("--out", type=Path, required=True)

    p = command("dispersion", cmd_dispersion, "dispersion curves, one CSV row per point")
    with_config(p)
    p.add_argument("--m", type=_int_spec, default=[0], help="width orders, e.g. 0,1,3 or 1:5")
    p.add_argument("--k-min", type=float, default=0.0, help="rad/cm")
    p.add_argument("--k-max", type=float, default=2000.0, help="rad/cm")
    p.add_argument("--k-steps", type=int, default=201)
    p.add_argument("--engine", choices=engines, default="paper")

    p = command("modes", cmd_modes, "cavity mode table")
    with_config(p)
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("--m-max", type=int, default=None)
    p.add_argument("--engine", choices=engines, default=None)

    p = command("response", cmd_response, "synthesized S21/S11")
    with_config(p)
    p.add_argument("--f-start", type=float, default=None, help="GHz")
    p.add_argument("--f-stop", type=float, default=None, help="GHz")
    p.add_argument("--points", type=int, default=None)
    p.add_argument("--touchstone", type=Path, default=None, help="also write a .s2p file")
    p.add_argument("--smith", type=Path, default=None, help="also write the Smith report JSON")

    p = command("sweep", cmd_sweep, "metrics over bias fields")
    with_config(p, h0_required=False)
    p.add_argument("--h0-list", type=_float_list, required=True, help="Gauss, comma list")

    p = command("optimize", cmd_optimize, "apodization grid search")
    with_config(p)
    p.add_argument(
        "--hcx", type=_range_spec, default=(40.0, 70.0, 5.0), help="µm start:stop:step"
    )
    p.add_argument(
        "--hcy", type=_range_spec, default=(60.0, 140.0, 20.0), help="µm start:stop:step"
    )

    p = command("compare", cmd_compare, "electrode shape comparison")
    with_config(p)
    p.add_argument("--shapes", type=_shape_list, default=list(TransducerShape))

    p = command("tilt", cmd_tilt, "straight electrodes on a tilted cavity")
    with_config(p)
    p.add_argument("--angles", type=_float_list, default=[0.0, 25.0, 35.0, 45.0], help="degrees")

    p = command("bounds", cmd_bounds, "band edges and field inversion")
    with_config(p)
    p.add_argument("--target-ghz", type=float, default=None, help="f_min to invert for a field")

    p = command("ordering", cmd_ordering, "width-order frequency ordering check")
    with_config(p, h0_required=False)
    p.add_argument("--h0", type=float, default=2500.0, help="bias field, Gauss")
    p.add_argument("--k-values", type=_float_list, default=[100.0, 300.0, 600.0], help="rad/cm")
    p.add_argument("--orders", type=_int_spec, default=[1, 2, 3, 4, 5])
    p.add_argument("--engine", choices=engines, default=str(EngineName.PAPER))

    p = command("settings", cmd_settings, "show or change the user settings")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="repeatable")

    return parser


def create_context(args: argparse.Namespace) -> AppContext:
    """Configure logging, discover plugins and resolve the worker count."""
    config = get_config()
    level = "DEBUG" if args.verbose else config.log_level
    log_dir = args.log_dir or (config.log_dir if config.log_to_file else None)
    setup_logger(log_dir, level)
    return AppContext(
        config=config,
        plugin_manager=get_plugin_manager(),
        jobs=config.resolve_jobs(args.jobs),
    )


def main(argv: Sequence[str] | None = None) -> int:
    """Run one command; returns the process exit code."""
    args = build_parser().parse_args(argv)
    ctx = create_context(args)
    try:
        outputs = args.func(ctx, args)
    except MagnonError as e:
        logger.error(f"{args.command} failed: {type(e).__name__}: {e}")
        return e.exit_code
    if outputs:
        logger.info(f"{args.command}: wrote {', '.join(str(p) for p in outputs)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
