import pytest

from create_config import build_config, parse_value
from intlab.errors import ConfigError


def test_parse_value():
    assert parse_value("", 3) == 3
    assert parse_value(" [0.5, 1] ", None) == [0.5, 1]
    assert parse_value("results/run", None) == "results/run"


def test_build_config_validates():
    config = build_config("toda", {"level": 2}, "out", 5)
    assert config == {"experiment": "toda", "params": {"level": 2}, "output_path": "out", "seed": 5}
    with pytest.raises(ConfigError):
        build_config("toda", {"levle": 2})
