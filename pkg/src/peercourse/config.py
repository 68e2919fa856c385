"""Service settings from a key=value file with environment overrides."""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional, Union

from .errors import ConfigInvalid

_KEYS = ("PORT", "DATA_DIR", "LOG_LEVEL")
_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass(frozen=True)
class ServiceConfig:
    port: int = 8000
    data_dir: Path = Path("data")
    log_level: str = "INFO"

    def validate(self) -> None:
        if not 1 <= self.port <= 65535:
            raise ConfigInvalid(f"PORT must be in 1..65535, got {self.port}")
        if self.log_level not in _LOG_LEVELS:
            raise ConfigInvalid(
                f"LOG_LEVEL must be one of {', '.join(_LOG_LEVELS)}, got {self.log_level!r}"
            )


def _parse_file(path: Path) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigInvalid(f"{path}:{lineno}: expected KEY=VALUE, got {stripped!r}")
        key, _, value = stripped.partition("=")
        values[key.strip()] = value.strip()
    return values


def load_config(
    path: Optional[Union[str, Path]] = None,
    env: Optional[Mapping[str, str]] = None,
) -> ServiceConfig:
    """Read the file if given, then apply PORT/DATA_DIR/LOG_LEVEL overrides."""
    env = os.environ if env is None else env
    values: dict[str, str] = {}
    if path is not None:
        file_path = Path(path)
        if not file_path.exists():
            raise ConfigInvalid(f"config file not found: {file_path}")
        values.update(_parse_file(file_path))
    for key in _KEYS:
        if key in env:
            values[key] = env[key]

    unknown = set(values) - set(_KEYS)
    if unknown:
        raise ConfigInvalid(f"unknown config keys: {', '.join(sorted(unknown))}")
    try:
        port = int(values.get("PORT", ServiceConfig.port))
    except ValueError as exc:
        raise ConfigInvalid(f"PORT must be an integer, got {values['PORT']!r}") from exc
    config = ServiceConfig(
        port=port,
        data_dir=Path(values.get("DATA_DIR", ServiceConfig.data_dir)),
        log_level=values.get("LOG_LEVEL", ServiceConfig.log_level).upper(),
    )
    config.validate()
    return config
