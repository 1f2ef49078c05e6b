"""Export — deterministic CSV, Touchstone and JSON writers plus run manifests."""

from __future__ import annotations

import csv
import hashlib
import json
import math
from collections.abc import Iterable, Sequence
from dataclasses import asdict, dataclass, field
from datetime import UTC, datetime
from pathlib import Path
from typing import Any

import numpy as np
from loguru import logger

from app import __version__
from app.data.device_config import canonical_json
from app.errors import InvalidArgument, IoError, ParseError
from app.models.cavity import CavityMode
from app.models.dispersion import DispersionPoint
from app.models.manifest import RunManifest
from app.models.response import ComparisonRow, FrequencyResponse, ScoreRow, SweepRow

DISPERSION_COLUMNS = ("k_x_rad_per_cm", "m", "f_hz", "engine")
MODE_COLUMNS = ("n", "m", "label", "k_x", "k_y", "f_hz", "status")
RESPONSE_COLUMNS = ("f_hz", "s21_re", "s21_im", "s11_re", "s11_im", "s21_db")
SWEEP_COLUMNS = (
    "h0_gauss",
    "f_center_hz",
    "il_db",
    "bw3_hz",
    "spur_suppression_db",
    "oob_rejection_db",
    "f_min_hz",
    "f_max_hz",
)
_METRIC_COLUMNS = (
    "f_center_hz",
    "il_db",
    "bw3_hz",
    "spur_suppression_db",
    "oob_rejection_db",
    "ripple_db",
)
SCORE_COLUMNS = ("hc_x_um", "hc_y_um", "score_db", *_METRIC_COLUMNS, "error")
COMPARISON_COLUMNS = (
    "variant",
    *_METRIC_COLUMNS,
    "top_primary_label",
    "top_primary_s21",
    "error",
)

TOUCHSTONE_COLUMNS = 9


@dataclass
class Table:
    """Named columns plus rows of plain values, ready for CSV."""

    columns: tuple[str, ...]
    rows: list[tuple[Any, ...]] = field(default_factory=list)

    def __post_init__(self) -> None:
        for row in self.rows:
            if len(row) != len(self.columns):
                raise InvalidArgument(
                    f"row has {len(row)} fields, table has {len(self.columns)} columns"
                )


def format_cell(value: Any) -> str:
    """Shortest round-trip text for floats, empty for missing values."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float | np.floating):
        return repr(float(value))
    if isinstance(value, int | np.integer):
        return str(int(value))
    return str(value)


# ── Table builders ──


def dispersion_table(points: Iterable[DispersionPoint]) -> Table:
    return Table(
        DISPERSION_COLUMNS,
        [(p.k_x, p.m, p.f, str(p.engine)) for p in points],
    )


def modes_table(modes: Iterable[CavityMode]) -> Table:
    return Table(
        MODE_COLUMNS,
        [(m.n, m.m, m.label, m.k_x, m.k_y, m.f, str(m.status)) for m in modes],
    )


def response_table(r: FrequencyResponse) -> Table:
    s21_db = r.s21_db
    rows = [
        (
            r.f_grid[i],
            r.s21[i].real,
            r.s21[i].imag,
            r.s11[i].real,
            r.s11[i].imag,
            s21_db[i],
        )
        for i in range(r.f_grid.size)
    ]
    return Table(RESPONSE_COLUMNS, rows)


def sweep_table(rows: Iterable[SweepRow]) -> Table:
    out = []
    for row in rows:
        m = row.metrics
        if m is None:
            out.append((row.h0, None, None, None, None, None, row.f_min, row.f_max))
        else:
            out.append(
                (
                    row.h0,
                    m.f_center,
                    m.il_db,
                    m.bw3_hz,
                    m.spur_suppression_db,
                    m.oob_rejection_db,
                    row.f_min,
                    row.f_max,
                )
            )
    return Table(SWEEP_COLUMNS, out)


def _metric_cells(metrics: Any) -> tuple[Any, ...]:
    if metrics is None:
        return (None,) * len(_METRIC_COLUMNS)
    return (
        metrics.f_center,
        metrics.il_db,
        metrics.bw3_hz,
        metrics.spur_suppression_db,
        metrics.oob_rejection_db,
        metrics.ripple_db,
    )


def score_table(rows: Iterable[ScoreRow]) -> Table:
    """Apodization grid in µm, one row per (hc_x, hc_y)."""
    return Table(
        SCORE_COLUMNS,
        [
            (
                round(r.hc_x * 1e4, 9),
                round(r.hc_y * 1e4, 9),
                r.score,
                *_metric_cells(r.metrics),
                r.error,
            )
            for r in rows
        ],
    )


def comparison_table(rows: Iterable[ComparisonRow]) -> Table:
    return Table(
        COMPARISON_COLUMNS,
        [
            (
                r.variant,
                *_metric_cells(r.metrics),
                r.top_primary_label,
                r.top_primary_s21 if r.top_primary_label else None,
                r.error,
            )
            for r in rows
        ],
    )


# ── Writers ──


def export_csv(table: Table, path: Path) -> None:
    """Header row plus one line per row; an empty table yields a header-only file."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="ascii", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(table.columns)
            for row in table.rows:
                writer.writerow([format_cell(v) for v in row])
    except (OSError, UnicodeEncodeError) as e:
        raise IoError(f"Failed to write CSV {path}: {e}") from e
    logger.debug(f"Wrote {len(table.rows)} rows to {path}")


def export_touchstone(r: FrequencyResponse, path: Path) -> None:
    """
    Two-port Touchstone v1 with RI data.

    S12 mirrors S21 and S22 mirrors S11; lines end in LF.
    """
    path = Path(path)
    lines = [f"# HZ S RI R {format_cell(r.port_impedance).removesuffix('.0')}"]
    for f, s11, s21 in zip(r.f_grid, r.s11, r.s21, strict=True):
        values = (
            f,
            s11.real,
            s11.imag,
            s21.real,
            s21.imag,
            s21.real,
            s21.imag,
            s11.real,
            s11.imag,
        )
        lines.append(" ".join(format_cell(v) for v in values))
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="ascii", newline="\n") as f:
            f.write("\n".join(lines) + "\n")
    except OSError as e:
        raise IoError(f"Failed to write Touchstone file {path}: {e}") from e
    logger.debug(f"Wrote {r.f_grid.size} frequency points to {path}")


def read_touchstone(path: Path) -> tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    """Read back a file written by export_touchstone: (f_hz, s11, s21, z0)."""
    path = Path(path)
    try:
        text = path.read_text(encoding="ascii")
    except (OSError, UnicodeDecodeError) as e:
        raise IoError(f"Cannot read Touchstone file {path}: {e}") from e

    z0 = 50.0
    rows: list[list[float]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("!", 1)[0].strip()
        if not line:
            continue
        if line.startswith("#"):
            tokens = line[1:].upper().split()
            if tokens[:3] != ["HZ", "S", "RI"]:
                raise ParseError(f"unsupported option line '{raw}'", lineno, 1)
            if "R" in tokens:
                z0 = float(tokens[tokens.index("R") + 1])
            continue
        tokens = line.split()
        if len(tokens) != TOUCHSTONE_COLUMNS:
            raise ParseError(
                f"expected {TOUCHSTONE_COLUMNS} columns, got {len(tokens)}", lineno, 1
            )
        try:
            rows.append([float(t) for t in tokens])
        except ValueError as e:
            raise ParseError(f"bad number: {e}", lineno, 1) from e

    if not rows:
        raise ParseError(f"no data lines in {path}", 0, 0)
    data = np.array(rows)
    s11 = data[:, 1] + 1j * data[:, 2]
    s21 = data[:, 3] + 1j * data[:, 4]
    return data[:, 0], s11, s21, z0


def _jsonable(value: Any) -> Any:
    if isinstance(value, complex | np.complexfloating):
        return {"re": float(value.real), "im": float(value.imag)}
    if isinstance(value, float | np.floating):
        v = float(value)
        return v if math.isfinite(v) else str(v)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, list | tuple):
        return [_jsonable(v) for v in value]
    return value


def export_json(data: Any, path: Path) -> None:
    """Sorted-key, indented JSON with complex numbers as {re, im}."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            json.dump(_jsonable(data), f, indent=2, sort_keys=True, ensure_ascii=True)
            f.write("\n")
    except OSError as e:
        raise IoError(f"Failed to write JSON {path}: {e}") from e


# ── Manifests ──


def input_digest(command: str, config: dict[str, Any], inputs: dict[str, Any]) -> str:
    """SHA-256 over the canonical command, resolved config and inputs."""
    payload = {"command": command, "config": _jsonable(config), "inputs": _jsonable(inputs)}
    return hashlib.sha256(canonical_json(payload).encode()).hexdigest()


def build_manifest(
    command: str,
    config: dict[str, Any],
    display_inputs: dict[str, Any] | None = None,
    outputs: Sequence[Path | str] = (),
) -> RunManifest:
    inputs = display_inputs or {}
    return RunManifest(
        command=command,
        config=config,
        tool_version=__version__,
        input_digest=input_digest(command, config, inputs),
        timestamp=datetime.now(UTC).isoformat(timespec="seconds"),
        display_inputs=inputs,
        outputs=[Path(p).name for p in outputs],
    )


def manifest_path(primary_output: Path) -> Path:
    primary_output = Path(primary_output)
    return primary_output.with_name(primary_output.name + ".manifest.json")


def write_manifest(manifest: RunManifest, primary_output: Path) -> Path:
    """Write ``<primary_output>.manifest.json`` and return its path."""
    path = manifest_path(primary_output)
    export_json(asdict(manifest), path)
    logger.debug(f"Manifest {path.name}: digest {manifest.input_digest[:12]}")
    return path
