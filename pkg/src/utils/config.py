import os
from dataclasses import dataclass

from dotenv import load_dotenv

ROOT_DIR = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

DEFAULT_PRIME = 65521
DEFAULT_SEED = 12345


@dataclass(frozen=True)
class Settings:
    """Runtime settings resolved from the environment (and an optional .env file)."""

    prime: int = DEFAULT_PRIME
    seed: int = DEFAULT_SEED
    max_retries: int = 5
    log_dir: str = os.path.join(ROOT_DIR, "logs")
    log_level: str = "INFO"
    oracle_max_basis: int = 2000
    oracle_max_pairs: int = 200000
    membership_max_degree: int = 4


def _int_env(name: str, default: int) -> int:
    value = os.getenv(name)
    if value is None or value.strip() == "":
        return default
    try:
        return int(value)
    except ValueError:
        raise ValueError(f"Environment variable {name} must be an integer, got {value!r}")


def get_settings() -> Settings:
    """
    Build the settings from DETF5_* environment variables.

    Returns:
        Settings: the resolved configuration; unset variables keep their defaults
    """
    load_dotenv()
    return Settings(
        prime=_int_env("DETF5_PRIME", DEFAULT_PRIME),
        seed=_int_env("DETF5_SEED", DEFAULT_SEED),
        max_retries=_int_env("DETF5_MAX_RETRIES", 5),
        log_dir=os.getenv("DETF5_LOG_DIR") or os.path.join(ROOT_DIR, "logs"),
        log_level=(os.getenv("DETF5_LOG_LEVEL") or "INFO").upper(),
        oracle_max_basis=_int_env("DETF5_ORACLE_MAX_BASIS", 2000),
        oracle_max_pairs=_int_env("DETF5_ORACLE_MAX_PAIRS", 200000),
        membership_max_degree=_int_env("DETF5_MEMBERSHIP_MAX_DEGREE", 4),
    )
