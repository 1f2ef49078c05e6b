"""Dispersion data models."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import StrEnum


class EngineName(StrEnum):
    """Dispersion engine tags."""

    PAPER = "paper"
    DE_ORACLE = "de-oracle"
    KS = "ks"

    @classmethod
    def parse(cls, value: str | EngineName) -> EngineName:
        """Accept a tag or the short CLI spelling ``de``."""
        if isinstance(value, EngineName):
            return value
        if value == "de":
            return cls.DE_ORACLE
        return cls(value)


class PointStatus(StrEnum):
    OK = "ok"
    GAP = "gap"  # no root in the MSSW band
    FAILED = "failed"  # solver or model error


@dataclass(frozen=True)
class DispersionPoint:
    """One evaluated (k_x, m) point. ``f`` and ``k_z`` are None for gaps."""

    k_x: float
    m: int
    f: float | None
    k_z: float | None
    engine: EngineName
    status: PointStatus = PointStatus.OK
    reason: str = ""

    @property
    def is_gap(self) -> bool:
        return self.status != PointStatus.OK


class OrderingOutcome(StrEnum):
    ORDERED = "ordered"
    VIOLATED = "violated"
    UNSOLVED = "unsolved"


@dataclass
class WidthOrderingReport:
    """Recorded check that higher width orders sit at lower frequency."""

    h0: float
    engine: EngineName
    points: list[DispersionPoint] = field(default_factory=list)
    outcome: OrderingOutcome = OrderingOutcome.ORDERED
    discrepancy: str = ""
