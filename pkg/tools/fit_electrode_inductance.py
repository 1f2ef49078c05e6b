"""Fit the electrode series inductance to a measured dual/single-cavity crossover.

Usage:
    python -m tools.fit_electrode_inductance                       # 15.75 GHz, 3 Ω, 50 Ω
    python -m tools.fit_electrode_inductance --crossover-ghz 15.75 --r 3 --z0 50

Prints the inductance in H, ready for ``device.electrode_l``.
"""

from __future__ import annotations

import argparse
import sys

from app.core.response import fit_electrode_inductance
from app.errors import MagnonError


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--crossover-ghz", type=float, default=15.75)
    parser.add_argument("--r", type=float, default=3.0, help="electrode resistance, Ω")
    parser.add_argument("--z0", type=float, default=50.0, help="port impedance, Ω")
    args = parser.parse_args()

    try:
        inductance = fit_electrode_inductance(args.crossover_ghz * 1e9, args.r, args.z0)
    except MagnonError as e:
        print(f"Error: {e}")
        return e.exit_code
    print(f"electrode_l = {inductance:.6e} H")
    return 0


if __name__ == "__main__":
    sys.exit(main())
