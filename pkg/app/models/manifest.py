"""Run manifest model."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class RunManifest:
    """Provenance record written next to every command's outputs."""

    command: str
    config: dict[str, Any]
    tool_version: str
    input_digest: str
    timestamp: str = ""  # excluded from the digest
    display_inputs: dict[str, Any] = field(default_factory=dict)
    outputs: list[str] = field(default_factory=list)
