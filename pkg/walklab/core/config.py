# config.py
import os
import logging

from dotenv import load_dotenv

load_dotenv(override=False)

logger = logging.getLogger(__name__)


def _env_int(name, default):
    try:
        return int(os.getenv(name, default))
    except (TypeError, ValueError):
        logger.warning(f"Ignoring non-integer {name}={os.getenv(name)!r}")
        return default


def _env_float(name, default):
    try:
        return float(os.getenv(name, default))
    except (TypeError, ValueError):
        logger.warning(f"Ignoring non-numeric {name}={os.getenv(name)!r}")
        return default


class Config:
    """Base configuration class"""
    # Run defaults (overridden by experiment files and CLI flags)
    DEFAULT_SEED = _env_int("WALKLAB_SEED", 20240601)
    DEFAULT_TRIALS = _env_int("WALKLAB_TRIALS", 10000)
    OUTPUT_DIR = os.getenv("WALKLAB_OUT", "runs")
    WORKERS = _env_int("WALKLAB_WORKERS", 4)
    BATCH_SIZE = _env_int("WALKLAB_BATCH_SIZE", 2000)
    STRICT = os.getenv("WALKLAB_STRICT", "1") == "1"

    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")

    # Geometry
    HALFPLANE_DELTA = _env_float("WALKLAB_HALFPLANE_DELTA", 1.0)
    KT_FACTOR = _env_float("WALKLAB_KT_FACTOR", 4.0)
    SEARCH_NODES = _env_int("WALKLAB_SEARCH_NODES", 200000)
    TREE_BALL_RADIUS = _env_int("WALKLAB_TREE_BALL_RADIUS", 6)
    SAMPLE_CONFIGS = _env_int("WALKLAB_SAMPLE_CONFIGS", 1000)

    # Statistics
    Z_SCORE = _env_float("WALKLAB_Z_SCORE", 3.0)
    MIN_VISITS = _env_int("WALKLAB_MIN_VISITS", 500)
    ENUMERATION_LIMIT = 4 ** 8
    SUPPORT_CAP = _env_int("WALKLAB_SUPPORT_CAP", 50000)

    @classmethod
    def validate(cls):
        """Warn about settings that will make runs fail or misbehave."""
        problems = []

        if cls.DEFAULT_TRIALS <= 0:
            problems.append("WALKLAB_TRIALS must be positive")
        if cls.WORKERS <= 0:
            problems.append("WALKLAB_WORKERS must be positive")
        if cls.BATCH_SIZE <= 0:
            problems.append("WALKLAB_BATCH_SIZE must be positive")
        if cls.HALFPLANE_DELTA <= 0:
            problems.append("WALKLAB_HALFPLANE_DELTA must be positive")
        if cls.Z_SCORE <= 0:
            problems.append("WALKLAB_Z_SCORE must be positive")

        if problems:
            logger.warning(f"Configuration problems: {'; '.join(problems)}")
        else:
            logger.debug(f"Configuration OK (seed={cls.DEFAULT_SEED}, trials={cls.DEFAULT_TRIALS}, workers={cls.WORKERS})")
        return problems


class StrictConfig(Config):
    STRICT = True


class ExploratoryConfig(Config):
    STRICT = False


config = {
    "strict": StrictConfig,
    "exploratory": ExploratoryConfig,
    "default": Config,
}
