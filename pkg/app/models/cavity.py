"""Cavity mode models and the p/w label convention."""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import StrEnum

from app.errors import InvalidArgument

_LABEL_PATTERN = re.compile(r"^p(\d+)w(\d+)$")


class ModeStatus(StrEnum):
    SOLVED = "solved"
    NO_SOLUTION = "no_solution"
    FAILED = "failed"


@dataclass(frozen=True)
class CavityMode:
    """One quantized resonance. ``f`` is None when the mode could not be solved."""

    n: int
    m: int
    k_x: float
    k_y: float
    f: float | None
    status: ModeStatus = ModeStatus.SOLVED
    reason: str = ""

    @property
    def label(self) -> str:
        return mode_label(self.n, self.m)

    @property
    def solved(self) -> bool:
        return self.status == ModeStatus.SOLVED and self.f is not None


def mode_label(n: int, m: int) -> str:
    """``p2w3`` is the third width mode of the second primary mode."""
    return f"p{n}w{m}"


def parse_mode_label(label: str) -> tuple[int, int]:
    match = _LABEL_PATTERN.match(label.strip())
    if not match:
        raise InvalidArgument(f"Not a mode label: {label!r}")
    return int(match.group(1)), int(match.group(2))


@dataclass(frozen=True)
class ModeGap:
    """Frequency gap between consecutive primary orders at fixed width order."""

    lower: str
    upper: str
    m: int
    delta_f: float
