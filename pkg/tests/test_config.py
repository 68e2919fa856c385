"""Settings file parsing and environment overrides."""

from pathlib import Path

import pytest

from peercourse.config import ServiceConfig, load_config
from peercourse.errors import ConfigInvalid


def test_defaults_without_file_or_env():
    config = load_config(env={})
    assert config == ServiceConfig(port=8000, data_dir=Path("data"), log_level="INFO")


def test_file_values_parsed(tmp_path):
    path = tmp_path / "service.conf"
    path.write_text(
        "# comment\n"
        "\n"
        "PORT = 9001\n"
        "DATA_DIR=/var/lib/peercourse\n"
        "LOG_LEVEL=debug\n"
    )
    config = load_config(path, env={})
    assert config.port == 9001
    assert config.data_dir == Path("/var/lib/peercourse")
    assert config.log_level == "DEBUG"


def test_env_overrides_file(tmp_path):
    path = tmp_path / "service.conf"
    path.write_text("PORT=9001\n")
    config = load_config(path, env={"PORT": "9002", "LOG_LEVEL": "warning"})
    assert config.port == 9002
    assert config.log_level == "WARNING"


def test_rejects_malformed_input(tmp_path):
    path = tmp_path / "service.conf"
    path.write_text("PORT 9001\n")
    with pytest.raises(ConfigInvalid):
        load_config(path, env={})
    path.write_text("VOLUME=11\n")
    with pytest.raises(ConfigInvalid):
        load_config(path, env={})
    with pytest.raises(ConfigInvalid):
        load_config(tmp_path / "missing.conf", env={})
    with pytest.raises(ConfigInvalid):
        load_config(env={"PORT": "not-a-number"})
    with pytest.raises(ConfigInvalid):
        load_config(env={"PORT": "70000"})
    with pytest.raises(ConfigInvalid):
        load_config(env={"LOG_LEVEL": "CHATTY"})
