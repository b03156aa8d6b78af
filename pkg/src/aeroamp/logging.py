"""aeroamp logging: console, a rotating user log, and a run log beside each output directory."""

import logging
from logging.handlers import RotatingFileHandler
from pathlib import Path

LOGGER_NAME = "aeroamp"

LOG_DIR = Path.home() / ".config" / "aeroamp" / "logs"
LOG_FILE = LOG_DIR / "aeroamp.log"

# Max 5 log files, 1MB each
MAX_BYTES = 1_000_000
BACKUP_COUNT = 5

RUN_LOG_NAME = "run.log"
# No timestamps: a rerun with the same inputs writes the same run log
RUN_LOG_FORMAT = "%(levelname)-7s %(module)s: %(message)s"


def setup_logging(verbose: bool = False) -> logging.Logger:
    """Configure and return the aeroamp logger.

    Console records go to stderr so JSON printed on stdout stays parseable.
    The user log under ~/.config/aeroamp/logs always records DEBUG.

    Args:
        verbose: If True, show DEBUG on the console; otherwise INFO.
    """
    logger = get_logger()
    if any(isinstance(h, RotatingFileHandler) or _is_console(h) for h in logger.handlers):
        return logger

    logger.setLevel(logging.DEBUG)
    console = logging.StreamHandler()
    console.setLevel(logging.DEBUG if verbose else logging.INFO)
    console.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    logger.addHandler(console)

    try:
        LOG_DIR.mkdir(parents=True, exist_ok=True)
        user_log = RotatingFileHandler(LOG_FILE, maxBytes=MAX_BYTES, backupCount=BACKUP_COUNT)
    except OSError as e:
        logger.warning(f"File logging disabled: {e}")
        return logger
    user_log.setLevel(logging.DEBUG)
    user_log.setFormatter(logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s"))
    logger.addHandler(user_log)
    return logger


def _is_console(handler: logging.Handler) -> bool:
    return type(handler) is logging.StreamHandler


def attach_run_log(out_dir: str | Path) -> logging.Handler:
    """Mirror the records of one command into <out_dir>/run.log.

    The file is rewritten on every run. Detach with detach_run_log.
    """
    handler = logging.FileHandler(Path(out_dir) / RUN_LOG_NAME, mode="w", encoding="utf-8")
    handler.setLevel(logging.DEBUG)
    handler.setFormatter(logging.Formatter(RUN_LOG_FORMAT))
    logger = get_logger()
    if logger.level == logging.NOTSET or logger.level > logging.DEBUG:
        logger.setLevel(logging.DEBUG)
    logger.addHandler(handler)
    return handler


def detach_run_log(handler: logging.Handler) -> None:
    get_logger().removeHandler(handler)
    handler.close()


def get_logger() -> logging.Logger:
    """Get the aeroamp logger."""
    return logging.getLogger(LOGGER_NAME)
