import pytest as pytest

from coring_cdga.config import Settings
from coring_cdga.errors import ConfigError


@pytest.fixture
def environment(monkeypatch):
    for name in ("CORING_CDGA_MAX_DEGREE", "CORING_CDGA_FORMAT", "CORING_CDGA_SEED", "CORING_CDGA_LOG_LEVEL",
                 "CORING_CDGA_ENTWINING_WINDOW"):
        monkeypatch.delenv(name, raising=False)
    return monkeypatch


def test_defaults(environment):
    assert Settings.from_environment() == Settings()
    assert Settings().max_degree == 4


def test_environment_values(environment):
    environment.setenv("CORING_CDGA_MAX_DEGREE", "3")
    environment.setenv("CORING_CDGA_FORMAT", " JSON ")
    environment.setenv("CORING_CDGA_LOG_LEVEL", "debug")
    environment.setenv("CORING_CDGA_ENTWINING_WINDOW", "")
    settings = Settings.from_environment()
    assert settings.max_degree == 3
    assert settings.output_format == "json"
    assert settings.log_level == "DEBUG"
    assert settings.entwining_window == 2


@pytest.mark.parametrize("name, value", [("CORING_CDGA_MAX_DEGREE", "1"), ("CORING_CDGA_MAX_DEGREE", "four"),
                                         ("CORING_CDGA_SEED", "-1"), ("CORING_CDGA_FORMAT", "xml"),
                                         ("CORING_CDGA_LOG_LEVEL", "loud")])
def test_bad_environment(environment, name, value):
    environment.setenv(name, value)
    with pytest.raises(ConfigError) as error:
        Settings.from_environment()
    assert error.value.witness


def test_replace_ignores_missing_flags():
    settings = Settings().replace(max_degree=3, output_format=None, seed=None)
    assert settings == Settings(max_degree=3)
    with pytest.raises(ConfigError):
        settings.replace(max_degree=1)


if __name__ == '__main__':
    pytest.main(["test_config.py"])
