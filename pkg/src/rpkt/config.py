"""YAML configuration for the CLI and the HTTP service."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .engine import DEFAULT_MAX_DEPTH
from .errors import RpktError
from .oracle import EducationLevel, FixtureOracle, Oracle, RemoteOracle

logger = logging.getLogger(__name__)

DEFAULT_STORE_DIR = "~/.rpkt/sessions"


class ConfigError(RpktError):
    """The configuration file is unreadable or has bad values."""


@dataclass
class OracleConfig:
    mode: str = "fixture"
    fixture_path: str | None = None
    base_url: str = "https://api.openai.com/v1"
    model: str = "gpt-4o-mini"
    timeout: float = 30.0


@dataclass
class ApiConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    cors_origins: list[str] = field(default_factory=lambda: ["http://localhost:5173"])


@dataclass
class Config:
    oracle: OracleConfig = field(default_factory=OracleConfig)
    api: ApiConfig = field(default_factory=ApiConfig)
    store_dir: str = DEFAULT_STORE_DIR
    education_level: str = EducationLevel.UNDERGRADUATE.value
    max_depth: int = DEFAULT_MAX_DEPTH


def _section(data: dict, name: str) -> dict:
    value = data.get(name, {})
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"config section {name!r} must be a mapping")
    return value


def load_config(path: str | Path | None = None) -> Config:
    """Read a YAML config file; every key is optional and defaulted."""
    config = Config()
    if path is None:
        return config
    try:
        raw = Path(path).expanduser().read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = yaml.safe_load(raw) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must be a YAML mapping")

    oracle = _section(data, "oracle")
    config.oracle = OracleConfig(
        mode=str(oracle.get("mode", config.oracle.mode)),
        fixture_path=oracle.get("fixture_path", config.oracle.fixture_path),
        base_url=str(oracle.get("base_url", config.oracle.base_url)),
        model=str(oracle.get("model", config.oracle.model)),
        timeout=float(oracle.get("timeout", config.oracle.timeout)),
    )
    api = _section(data, "api")
    origins = api.get("cors_origins", config.api.cors_origins)
    if not isinstance(origins, list) or not all(isinstance(o, str) for o in origins):
        raise ConfigError("api.cors_origins must be a list of strings")
    config.api = ApiConfig(
        host=str(api.get("host", config.api.host)),
        port=int(api.get("port", config.api.port)),
        cors_origins=list(origins),
    )
    config.store_dir = str(data.get("store_dir", config.store_dir))
    config.education_level = EducationLevel.parse(
        data.get("education_level", config.education_level)
    ).value
    config.max_depth = int(data.get("max_depth", config.max_depth))

    known = {"oracle", "api", "store_dir", "education_level", "max_depth"}
    for key in set(data) - known:
        logger.warning("ignoring unknown config key %r", key)
    return config


def build_oracle(config: Config) -> Oracle:
    """Instantiate the configured oracle."""
    mode = config.oracle.mode
    if mode == "fixture":
        if not config.oracle.fixture_path:
            raise ConfigError("oracle.mode is 'fixture' but oracle.fixture_path is unset")
        return FixtureOracle.from_file(config.oracle.fixture_path)
    if mode == "remote":
        return RemoteOracle(
            base_url=config.oracle.base_url,
            model=config.oracle.model,
            timeout=config.oracle.timeout,
        )
    raise ConfigError(f"unknown oracle.mode {mode!r} (expected 'fixture' or 'remote')")
