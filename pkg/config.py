import os
import logging
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

__version__ = "1.0.0"

logger = logging.getLogger(__name__)

FALLBACK_TOL_SCALE = 1e-10


def _read_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = float(raw)
    except ValueError:
        logger.warning(f"{name}={raw!r} is not a number, using {default}")
        return default
    if not value > 0:
        logger.warning(f"{name}={raw!r} must be positive, using {default}")
        return default
    return value


def _read_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        logger.warning(f"{name}={raw!r} is not an integer, using {default}")
        return default


# Process-wide defaults, read once at startup
DEFAULT_TOL_SCALE = _read_float("OPEQ_TOL_SCALE", FALLBACK_TOL_SCALE)
DEFAULT_WORKERS = _read_int("OPEQ_WORKERS", 1)
LOG_LEVEL = os.getenv("OPEQ_LOG_LEVEL", "INFO").upper()


def setup_logging(quiet: bool = False) -> None:
    """Configure root logging for command line runs"""
    level = logging.WARNING if quiet else getattr(logging, LOG_LEVEL, logging.INFO)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger().setLevel(level)
