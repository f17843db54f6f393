"""Environment configuration, loaded from .env when present"""
import os
import logging
from typing import List

from dotenv import load_dotenv

load_dotenv()
logger = logging.getLogger(__name__)

DEFAULT_THREADS = 1
DEFAULT_SEARCH_BUDGET = 200_000
DEFAULT_ORACLE_BUDGET = 2_000_000
DEFAULT_DATABASE_URL = "sqlite:///./wfp_results.db"
DEFAULT_CORS_ORIGINS = "http://localhost:3000,http://127.0.0.1:3000"


def _positive_int(name: str, default: int) -> int:
    """Read a positive integer from the environment, falling back to default"""
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning(f"{name}={raw!r} is not an integer, using {default}")
        return default
    if value < 1:
        logger.warning(f"{name}={value} must be at least 1, using {default}")
        return default
    return value


def get_thread_count() -> int:
    """Default worker count for search and oracles (WFP_THREADS)"""
    return _positive_int("WFP_THREADS", DEFAULT_THREADS)


def get_search_budget() -> int:
    """Default node budget for search_max_code (WFP_SEARCH_BUDGET)"""
    return _positive_int("WFP_SEARCH_BUDGET", DEFAULT_SEARCH_BUDGET)


def get_oracle_budget() -> int:
    """Default node budget for the exhaustive oracles (WFP_ORACLE_BUDGET)"""
    return _positive_int("WFP_ORACLE_BUDGET", DEFAULT_ORACLE_BUDGET)


def get_database_url() -> str:
    return os.getenv("WFP_DATABASE_URL", DEFAULT_DATABASE_URL)


def get_log_level(default: str = "INFO") -> int:
    """Resolve WFP_LOG_LEVEL to a logging level"""
    name = os.getenv("WFP_LOG_LEVEL", default).upper()
    level = logging.getLevelName(name)
    if not isinstance(level, int):
        return logging.getLevelName(default.upper())
    return level


def get_cors_origins() -> List[str]:
    raw = os.getenv("WFP_CORS_ORIGINS", DEFAULT_CORS_ORIGINS)
    return [origin.strip() for origin in raw.split(",") if origin.strip()]


# Version stamped into every JSON payload (analyze, bounds, certificates, search)
SCHEMA_VERSION = "1.0"
