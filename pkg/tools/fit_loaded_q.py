"""Fit the loaded quality factor to a target 3-dB bandwidth.

Usage:
    python -m tools.fit_loaded_q                                  # 200 MHz at 2500 G, defaults
    python -m tools.fit_loaded_q --bw-mhz 196 --h0 2500 --config device.json --jobs 4

Prints the fitted Q and the metrics it yields, ready for ``film.q_loaded``.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from app.core.cavity import enumerate_modes
from app.core.response import default_frequency_grid, fit_loaded_q
from app.core.sweep import evaluate_design
from app.data.device_config import device_config_from_dict, parse_device_config
from app.errors import MagnonError
from app.models.film import BiasField


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--bw-mhz", type=float, default=200.0, help="target 3-dB bandwidth")
    parser.add_argument("--h0", type=float, default=2500.0, help="bias field, G")
    parser.add_argument("--config", default=None, help="device config JSON")
    parser.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args()

    try:
        cfg = parse_device_config(args.config) if args.config else device_config_from_dict({})
        bias = BiasField(args.h0)
        s = cfg.solver
        modes = enumerate_modes(cfg.film, bias, s.n_max, s.m_max, s.engine, s, args.jobs)
        grid = default_frequency_grid(cfg.film, bias)
        q = fit_loaded_q(cfg, bias, args.bw_mhz * 1e6, modes=modes, f_grid=grid)
        fitted = replace(cfg, film=replace(cfg.film, q_loaded=q))
        metrics = evaluate_design(fitted, bias, modes, grid)
    except MagnonError as e:
        print(f"Error: {e}")
        return e.exit_code
    print(f"q_loaded = {q:.6g}")
    print(
        f"f_center = {metrics.f_center / 1e9:.4f} GHz, bw3 = {metrics.bw3_hz / 1e6:.2f} MHz, "
        f"IL = {metrics.il_db:.2f} dB"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
