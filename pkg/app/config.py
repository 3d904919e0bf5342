# app/config.py
import os
import logging

logger = logging.getLogger(__name__)

# Values may come from the process environment or a .env file loaded by app/main.py.
LOG_LEVEL = os.getenv("PDL_LOG_LEVEL", "WARNING").upper()
LOG_FILE = os.getenv("PDL_LOG_FILE") or None


def _int_setting(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning(f"Ignoring non-integer {name}={raw!r}; using {default}")
        return default
    if value < 1:
        logger.warning(f"Ignoring non-positive {name}={value}; using {default}")
        return default
    return value


def tiling_node_budget() -> int:
    """Maximum number of placements tried by one tiling search."""
    return _int_setting("PDL_TILING_NODE_BUDGET", 2_000_000)


def model_budget() -> int:
    """Maximum number of candidate models bounded_sat may evaluate."""
    return _int_setting("PDL_MODEL_BUDGET", 500_000)


def workers() -> int:
    return _int_setting("PDL_WORKERS", 1)


logger.debug(
    f"Configuration: log_level={LOG_LEVEL}, log_file={LOG_FILE}, "
    f"tiling_budget={tiling_node_budget()}, model_budget={model_budget()}, workers={workers()}"
)
