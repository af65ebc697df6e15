"""Numerical settings: JSON defaults shipped with the package, environment overrides on top.

The lookup order is
  1. the file named by ``path`` (CLI ``--config``) or ``LOGOPOLE_CONFIG``,
     falling back to ``config.json`` next to this module;
  2. ``LOGOPOLE_<KEY>`` environment variables, one per key;
  3. explicit ``overrides`` (CLI flags such as ``--tol``).
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, fields, replace
from functools import lru_cache
from pathlib import Path
from typing import Any, Mapping

from .errors import InvalidInput

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = Path(__file__).with_name("config.json")
ENV_PREFIX = "LOGOPOLE_"


@dataclass(frozen=True)
class Settings:
    tol: float = 1e-11
    series_tol: float = 1e-14
    tube_eps: float = 1e-8
    term_cap: int = 100000
    backward_padding: int = 60
    rescale_tol: float = 1e-13
    max_subdivisions: int = 2000
    boundary_band: tuple[float, float] = (0.95, 1.05)
    band_max_degree: int = 12
    band_offset_radius: float = 1.2
    closed_form_xibar_max: float = 50.0
    miller_min_padding: int = 20
    miller_padding_cap: int = 20000
    beta_unstable_p: int = 20
    beta_stop_run: int = 5
    beta_p_cap: int = 200
    workers: int = 1
    log_level: str = "INFO"


_FIELD_TYPES = {f.name: f.type for f in fields(Settings)}


def _coerce(key: str, raw: Any) -> Any:
    kind = _FIELD_TYPES[key]
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "str":
            return str(raw)
        # boundary band: JSON list or "lo,hi" from the environment
        if isinstance(raw, str):
            raw = [part for part in raw.split(",") if part.strip()]
        lo, hi = (float(v) for v in raw)
        return (lo, hi)
    except (TypeError, ValueError) as e:
        raise InvalidInput(f"Bad value for setting '{key}': {raw!r} ({e})") from e


def _read_file(path: Path) -> dict[str, Any]:
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except FileNotFoundError as e:
        raise InvalidInput(f"Config file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise InvalidInput(f"Config file {path} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise InvalidInput(f"Config file {path} must hold a JSON object")
    return data


def load_settings(
    path: str | Path | None = None, overrides: Mapping[str, Any] | None = None
) -> Settings:
    """Build Settings from a JSON file, ``LOGOPOLE_*`` environment values and ``overrides``."""
    if path is None:
        path = os.getenv(f"{ENV_PREFIX}CONFIG") or DEFAULT_CONFIG_PATH
    data = _read_file(Path(path))

    values: dict[str, Any] = {}
    for key, raw in data.items():
        if key not in _FIELD_TYPES:
            logger.warning(f"Ignoring unknown setting '{key}' in {path}")
            continue
        values[key] = _coerce(key, raw)

    for key in _FIELD_TYPES:
        env_value = os.getenv(f"{ENV_PREFIX}{key.upper()}")
        if env_value is not None:
            values[key] = _coerce(key, env_value)

    for key, raw in (overrides or {}).items():
        if key not in _FIELD_TYPES:
            raise InvalidInput(f"Unknown setting '{key}'")
        values[key] = _coerce(key, raw)

    settings = replace(Settings(), **values)
    if settings.tol <= 0 or settings.series_tol <= 0 or settings.tube_eps < 0:
        raise InvalidInput("Tolerances must be positive")
    lo, hi = settings.boundary_band
    if not 0 < lo < 1 < hi:
        raise InvalidInput(f"boundary_band must straddle 1, got {settings.boundary_band}")
    logger.debug(f"Loaded settings from {path}: {settings}")
    return settings


# what get_settings loads: a file (None for the usual lookup) and per-key overrides
_selection: dict[str, Any] = {"path": None, "overrides": {}}


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return load_settings(_selection["path"], _selection["overrides"])


def current_selection() -> tuple[str | Path | None, dict[str, Any]]:
    return _selection["path"], dict(_selection["overrides"])


def use_settings(
    path: str | Path | None = None, overrides: Mapping[str, Any] | None = None
) -> Settings:
    """Point the process-wide settings at another file (CLI ``--config``) and flag values."""
    get_settings.cache_clear()
    _selection["path"] = path
    _selection["overrides"] = dict(overrides or {})
    return get_settings()


def reset_settings() -> None:
    get_settings.cache_clear()
    _selection["path"] = None
    _selection["overrides"] = {}
