"""Device configuration — strict JSON ingestion, defaults, persistence and digests."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict
from pathlib import Path
from typing import Any

from loguru import logger

from app.errors import IoError, ParseError, ValidationError
from app.models.film import FerriteFilm
from app.models.response import DEFAULT_ELECTRODE_L, DeviceConfig, SolverSettings
from app.models.transducer import TransducerPair

# Units: film/transducer lengths cm, fields G, frequencies Hz, impedances Ω, inductance H.
# ``None`` marks a default derived from other keys.
DEVICE_DEFAULTS: dict[str, dict[str, Any]] = {
    "film": {
        "b_sat": 1750.0,
        "gamma": 2.8e6,
        "exch": 5.18e-13,
        "thickness": 15e-4,
        "length": 280e-4,
        "width": 400e-4,
        "q_loaded": 500.0,
    },
    "transducer": {
        "shape": "half_cone",
        "base_width": 10e-4,
        "hc_x": 65e-4,
        "hc_y": 100e-4,
        "gap0": None,  # film.length / 2
        "tilt_deg": 0.0,
        "extended_asymmetry": None,  # 40 µm for extended_cone, else 0
        "arc_sag": 0.0,
        "current_model": "inverse_width",
    },
    "device": {
        "cavities": 1,
        "port_impedance": 50.0,
        "electrode_r": 3.0,
        "electrode_l": DEFAULT_ELECTRODE_L,
    },
    "solver": {
        "engine": "ks",
        "n_max": 10,
        "m_max": 7,
        "scan_points": 4096,
        "max_iter": 200,
        "tol_hz": 1.0,
        "quad_limit": 10000,
    },
}

_INT_KEYS = {"cavities", "n_max", "m_max", "scan_points", "max_iter", "quad_limit"}
_STR_KEYS = {"shape", "current_model", "engine"}


def _check_value(section: str, key: str, value: Any) -> Any:
    where = f"{section}.{key}"
    if key in _STR_KEYS:
        if not isinstance(value, str):
            raise ValidationError(f"{where} must be a string")
        return value
    if isinstance(value, bool) or not isinstance(value, int | float):
        raise ValidationError(f"{where} must be a number")
    if key in _INT_KEYS:
        if isinstance(value, float) and not value.is_integer():
            raise ValidationError(f"{where} must be an integer")
        return int(value)
    return float(value)


def _merge_strict(data: Any) -> dict[str, dict[str, Any]]:
    """Overlay user sections on the defaults, rejecting anything unknown."""
    if not isinstance(data, dict):
        raise ValidationError("device config must be a JSON object")
    merged = json.loads(json.dumps(DEVICE_DEFAULTS))  # deep copy defaults
    for section, values in data.items():
        if section not in DEVICE_DEFAULTS:
            raise ValidationError(f"unknown section '{section}'")
        if not isinstance(values, dict):
            raise ValidationError(f"section '{section}' must be an object")
        for key, value in values.items():
            if key not in DEVICE_DEFAULTS[section]:
                raise ValidationError(f"unknown key '{section}.{key}'")
            if value is None:
                if DEVICE_DEFAULTS[section][key] is not None:
                    raise ValidationError(f"{section}.{key} must not be null")
                merged[section][key] = None
            else:
                merged[section][key] = _check_value(section, key, value)
    return merged


def device_config_from_dict(data: Any) -> DeviceConfig:
    """Build and validate a DeviceConfig from a parsed JSON document."""
    from app.core.transducer import validate_transducer

    merged = _merge_strict(data)
    try:
        film = FerriteFilm(**merged["film"])
        transducer_args = dict(merged["transducer"])
        if transducer_args["gap0"] is None:
            transducer_args["gap0"] = film.length / 2
        transducer = TransducerPair(**transducer_args)
        cfg = DeviceConfig(
            film=film,
            transducer=transducer,
            solver=SolverSettings(**merged["solver"]),
            **merged["device"],
        )
    except (ValueError, TypeError) as e:
        if isinstance(e, ValidationError):
            raise
        raise ValidationError(str(e)) from e
    validate_transducer(cfg.transducer, cfg.film)
    return cfg


def load_device_json(path: Path) -> Any:
    """Read a JSON document, mapping syntax errors to ParseError with position."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise IoError(f"Cannot read device config {path}: {e}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"Invalid JSON in {path}: {e.msg}", e.lineno, e.colno) from e


def parse_device_config(path: Path) -> DeviceConfig:
    """Strict device config: unknown keys rejected, missing keys defaulted."""
    cfg = device_config_from_dict(load_device_json(path))
    logger.info(
        f"Loaded device config {Path(path).name}: {cfg.transducer.shape}, "
        f"{cfg.cavities} cavit{'y' if cfg.cavities == 1 else 'ies'}, engine {cfg.solver.engine}"
    )
    return cfg


def device_config_to_dict(cfg: DeviceConfig) -> dict[str, Any]:
    """Resolved config in the JSON schema layout (all values explicit)."""
    transducer = asdict(cfg.transducer)
    transducer["shape"] = str(cfg.transducer.shape)
    solver = asdict(cfg.solver)
    solver["engine"] = str(cfg.solver.engine)
    return {
        "film": asdict(cfg.film),
        "transducer": transducer,
        "device": {
            "cavities": cfg.cavities,
            "port_impedance": cfg.port_impedance,
            "electrode_r": cfg.electrode_r,
            "electrode_l": cfg.electrode_l,
        },
        "solver": solver,
    }


def canonical_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def config_digest(cfg: DeviceConfig) -> str:
    """SHA-256 of the canonical resolved config."""
    return hashlib.sha256(canonical_json(device_config_to_dict(cfg)).encode()).hexdigest()


def save_device_config(cfg: DeviceConfig, path: Path) -> None:
    """Write the resolved config atomically (tmp file + replace)."""
    path = Path(path)
    tmp_path = path.with_suffix(".tmp")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(tmp_path, "w", encoding="utf-8", newline="\n") as f:
            json.dump(device_config_to_dict(cfg), f, indent=2, sort_keys=True)
            f.write("\n")
        tmp_path.replace(path)
    except OSError as e:
        tmp_path.unlink(missing_ok=True)
        raise IoError(f"Failed to save device config {path}: {e}") from e
