"""Cavity — quantized (n, m) resonances and primary-mode spacing diagnostics."""

from __future__ import annotations

import math
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor

from loguru import logger

from app.core.materials import require_field
from app.errors import InvalidArgument, NoSolutionInBand, NumericalError, TooFewModes
from app.models.cavity import CavityMode, ModeGap, ModeStatus
from app.models.dispersion import EngineName
from app.models.film import BiasField, FerriteFilm
from app.models.response import SolverSettings
from app.plugins.plugin_manager import get_plugin_manager


def primary_wavenumber(film: FerriteFilm, n: int) -> float:
    """k_xn = nπ/L from the round-trip standing-wave condition."""
    return n * math.pi / film.length


def _sort_key(mode: CavityMode) -> tuple[int, float, int, int]:
    if mode.solved:
        return (0, mode.f, mode.n, mode.m)
    return (1, 0.0, mode.n, mode.m)


def enumerate_modes(
    film: FerriteFilm,
    bias: BiasField,
    n_max: int = 10,
    m_max: int = 7,
    engine: EngineName | str = EngineName.KS,
    settings: SolverSettings | None = None,
    jobs: int = 1,
) -> list[CavityMode]:
    """
    All (n, m) modes up to the given orders, sorted by frequency then (n, m).

    Modes that cannot be solved stay in the list with a null frequency and the
    reason; they sort after the solved ones.
    """
    if n_max < 1 or m_max < 1:
        raise InvalidArgument("n_max and m_max must be at least 1")
    require_field(bias)
    plugin = get_plugin_manager().get_engine(engine)
    if not plugin.resolves_width_modes:
        logger.debug(f"Engine '{plugin.name}' ignores the width order; w-families coincide")

    def solve(nm: tuple[int, int]) -> CavityMode:
        n, m = nm
        k_x = primary_wavenumber(film, n)
        k_y = m * math.pi / film.width
        try:
            point = plugin.evaluate(film, bias, k_x, m, settings)
        except NoSolutionInBand as e:
            return CavityMode(n, m, k_x, k_y, None, ModeStatus.NO_SOLUTION, str(e))
        except NumericalError as e:
            return CavityMode(n, m, k_x, k_y, None, ModeStatus.FAILED, str(e))
        return CavityMode(n, m, k_x, k_y, point.f)

    pairs = [(n, m) for n in range(1, n_max + 1) for m in range(1, m_max + 1)]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            modes = list(pool.map(solve, pairs))
    else:
        modes = [solve(nm) for nm in pairs]

    modes.sort(key=_sort_key)
    unsolved = [m for m in modes if not m.solved]
    if unsolved:
        logger.warning(
            f"{len(unsolved)}/{len(modes)} modes unsolved at {bias.h0:g} G "
            f"with engine '{plugin.name}'"
        )
    return modes


def mode_spacing_report(modes: list[CavityMode]) -> list[ModeGap]:
    """Gaps between consecutive primary orders at fixed width order."""
    by_width: dict[int, dict[int, CavityMode]] = defaultdict(dict)
    for mode in modes:
        if mode.solved:
            by_width[mode.m][mode.n] = mode

    gaps: list[ModeGap] = []
    for m in sorted(by_width):
        family = by_width[m]
        for n in sorted(family):
            upper = family.get(n + 1)
            if upper is None:
                continue
            lower = family[n]
            gaps.append(ModeGap(lower.label, upper.label, m, upper.f - lower.f))

    if not gaps:
        raise TooFewModes("need at least two consecutive solved modes sharing a width order")
    return gaps
