"""Dense-scan reference solver for the width-mode self-consistency loop.

Usage:
    python -m tools.dense_scan <h0_gauss> <k_x_rad_per_cm> <m> [--cells N]

Evaluates f − f_DE(k_z(f)) on a uniform grid over the MSSW band, then
halves every bracketing cell in lock-step until it is narrower than 1 mHz.
Shares no code with ``app.core.dispersion`` so tests can use it as an
independent oracle; film constants are passed in explicitly.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

DEFAULT_CELLS = 200_000
BRACKET_EPS = 1e-6


def _residual(
    f: np.ndarray,
    h0: float,
    k_x: float,
    m: int,
    *,
    gamma: float,
    b_sat: float,
    exch: float,
    thickness: float,
    width: float,
) -> np.ndarray:
    w_norm = f / (gamma * b_sat)
    h_norm = h0 / b_sat
    mu1 = 1.0 - h_norm / (w_norm**2 - h_norm**2)
    k_y2 = (m * np.pi / width) ** 2
    k_z2 = k_x**2 + k_y2 / mu1
    x = np.sqrt(k_z2) * thickness
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(x < 1e-4, x / 2 - x**2 / 6, 1.0 - (1.0 - np.exp(-x)) / x)
    a = h0 + b_sat * (1.0 - p + exch * k_z2)
    b = h0 + b_sat * (p * k_y2 / k_z2 + exch * k_z2)
    return f - gamma * np.sqrt(a * b)


def all_roots(
    h0: float,
    k_x: float,
    m: int,
    *,
    cells: int = DEFAULT_CELLS,
    gamma: float = 2.8e6,
    b_sat: float = 1750.0,
    exch: float = 5.18e-13,
    thickness: float = 15e-4,
    width: float = 400e-4,
) -> np.ndarray:
    """Every sign change of the residual inside the band, ascending (Hz)."""
    consts = {
        "gamma": gamma,
        "b_sat": b_sat,
        "exch": exch,
        "thickness": thickness,
        "width": width,
    }
    base = h0 * (h0 + b_sat)
    lo = gamma * np.sqrt(base) * (1 + BRACKET_EPS)
    hi = gamma * np.sqrt(base + b_sat**2 / 4) * (1 - BRACKET_EPS)
    grid = np.linspace(lo, hi, cells + 1)
    g = _residual(grid, h0, k_x, m, **consts)
    idx = np.nonzero(np.sign(g[:-1]) * np.sign(g[1:]) < 0)[0]
    if idx.size == 0:
        return np.empty(0)

    a, b = grid[idx].copy(), grid[idx + 1].copy()
    ga = g[idx].copy()
    while np.max(b - a) > 1e-3:
        mid = 0.5 * (a + b)
        gm = _residual(mid, h0, k_x, m, **consts)
        left = np.sign(gm) == np.sign(ga)
        a = np.where(left, mid, a)
        ga = np.where(left, gm, ga)
        b = np.where(left, b, mid)
    return 0.5 * (a + b)


def lowest_root(h0: float, k_x: float, m: int, **kwargs: float) -> float | None:
    roots = all_roots(h0, k_x, m, **kwargs)
    return float(roots[0]) if roots.size else None


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("h0", type=float, help="bias field, Gauss")
    parser.add_argument("k_x", type=float, help="rad/cm")
    parser.add_argument("m", type=int, help="width order")
    parser.add_argument("--cells", type=int, default=DEFAULT_CELLS)
    args = parser.parse_args()

    roots = all_roots(args.h0, args.k_x, args.m, cells=args.cells)
    if roots.size == 0:
        print("No root in band")
        return 1
    for f in roots:
        print(f"{f / 1e9:.9f} GHz")
    return 0


if __name__ == "__main__":
    sys.exit(main())
