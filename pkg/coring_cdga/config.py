import os
from dataclasses import dataclass

from coring_cdga.errors import ConfigError

FORMATS = ("text", "json")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def _int_setting(name: str, default: int, minimum: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError as exc:
        raise ConfigError(f"Settings.from_environment -- {name} must be an integer, got {raw!r}",
                          witness={name: raw}) from exc
    if value < minimum:
        raise ConfigError(f"Settings.from_environment -- {name} must be at least {minimum}", witness={name: raw})
    return value


@dataclass(frozen=True)
class Settings:
    max_degree: int = 4
    output_format: str = "text"
    seed: int = 0
    log_level: str = "WARNING"
    entwining_window: int = 2

    def __post_init__(self):
        if self.max_degree < 2:
            raise ConfigError(f"Settings -- max_degree must be at least 2, got {self.max_degree}",
                              witness={"max_degree": self.max_degree})
        if self.output_format not in FORMATS:
            raise ConfigError(f"Settings -- format must be one of {FORMATS}, got {self.output_format!r}",
                              witness={"format": self.output_format})
        if self.log_level not in LOG_LEVELS:
            raise ConfigError(f"Settings -- unknown log level {self.log_level!r}",
                              witness={"log_level": self.log_level})

    def replace(self, **overrides) -> "Settings":
        """a copy with the given non-None overrides, e.g. from command-line flags"""
        values = {key: value for key, value in overrides.items() if value is not None}
        return Settings(**{**self.__dict__, **values})

    @classmethod
    def from_environment(cls):
        """read CORING_CDGA_* variables; call load_dotenv(find_dotenv()) first to honor a .env file"""
        max_degree = _int_setting("CORING_CDGA_MAX_DEGREE", 4, minimum=2)
        output_format = os.getenv("CORING_CDGA_FORMAT", "text").strip().lower()
        seed = _int_setting("CORING_CDGA_SEED", 0, minimum=0)
        log_level = os.getenv("CORING_CDGA_LOG_LEVEL", "WARNING").strip().upper()
        entwining_window = _int_setting("CORING_CDGA_ENTWINING_WINDOW", 2, minimum=0)

        return cls(max_degree=max_degree,
                   output_format=output_format,
                   seed=seed,
                   log_level=log_level,
                   entwining_window=entwining_window)
