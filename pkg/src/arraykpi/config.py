"""Flat ``key = value`` scenario files.

Keys are dotted (``array.kind``, ``ues.k``, ...); ``#`` starts a comment.
Omitted keys take the default scenario: isotropic half-wavelength ULA,
N = N_ref = 32, K = 8 over a 120 degree sector, P_UL = 10 dB, 10^4 trials,
no dropping (threshold 0.45 when enabled).
"""

from __future__ import annotations

import json
import typing
from dataclasses import asdict, fields
from pathlib import Path

from .errors import ConfigurationError
from .montecarlo import ScenarioConfig

__all__ = ["CONFIG_KEYS", "parse_config", "config_from_mapping", "serialize_config", "load_config_file"]


def _key(field_name: str) -> str:
    return field_name.replace("_", ".", 1)


_TYPES = typing.get_type_hints(ScenarioConfig)
CONFIG_KEYS = {_key(f.name): f.name for f in fields(ScenarioConfig)}

_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}


def _convert(key: str, value):
    name = CONFIG_KEYS[key]
    typ = _TYPES[name]
    if isinstance(value, str):
        value = value.strip()
        if len(value) >= 2 and value[0] == value[-1] and value[0] in "\"'":
            value = value[1:-1]
    try:
        if typ is bool:
            if isinstance(value, bool):
                return value
            low = str(value).lower()
            if low in _TRUE:
                return True
            if low in _FALSE:
                return False
            raise ValueError(f"expected a boolean, got {value!r}")
        if typ is int:
            if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
                raise ValueError(f"expected an integer, got {value!r}")
            return int(value) if not isinstance(value, str) else int(value, 10)
        if typ is float:
            if isinstance(value, bool):
                raise ValueError(f"expected a number, got {value!r}")
            return float(value)
        # str or optional str
        if value is None or (typ != str and str(value).lower() in ("", "none")):
            return None
        return str(value)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"{key}: {exc}") from None


def config_from_mapping(mapping) -> ScenarioConfig:
    """Build a validated config from ``{dotted_key: value}``."""
    kwargs = {}
    for key, value in mapping.items():
        if key not in CONFIG_KEYS:
            raise ConfigurationError(f"{key}: unknown configuration key")
        kwargs[CONFIG_KEYS[key]] = _convert(key, value)
    return ScenarioConfig(**kwargs)


def parse_config(text: str) -> ScenarioConfig:
    """Parse a ``key = value`` document into a :class:`ScenarioConfig`.

    Raises:
        ConfigurationError: Naming the offending key or line.
    """
    mapping = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigurationError(f"{key}: unknown configuration key (line {lineno})")
        if key in mapping:
            raise ConfigurationError(f"{key}: given more than once (line {lineno})")
        mapping[key] = value
    return config_from_mapping(mapping)


def config_to_mapping(config: ScenarioConfig) -> dict:
    return {_key(name): value for name, value in asdict(config).items()}


def serialize_config(config: ScenarioConfig) -> str:
    lines = []
    for key, value in config_to_mapping(config).items():
        if value is None:
            value = ""
        elif isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, float):
            value = repr(value)
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def load_config_file(path) -> ScenarioConfig:
    """Load a config file, or the echoed config of a run manifest (JSON)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"{path}: {exc.strerror}") from None
    if text.lstrip().startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"{path}: invalid JSON: {exc}") from None
        return config_from_mapping(doc.get("config", doc))
    return parse_config(text)
