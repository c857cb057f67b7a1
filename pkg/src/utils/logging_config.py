"""Loguru sinks for the rado CLI: progress on stderr, an optional rotating file."""
import sys
from pathlib import Path

from loguru import logger

STDERR_FORMAT = "<level>{level: <8}</level> | <cyan>{name}</cyan>:<cyan>{line}</cyan> | {message}"
FILE_FORMAT = "{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {name}:{function}:{line} | {message}"


def configure_logging(level: str = "INFO", log_file: str | None = None, colorize: bool = True) -> None:
    """
    Replace loguru's default sink.

    stdout carries only the JSON/CSV payload, so progress goes to stderr.
    The file sink (RADO_LOG_FILE) rotates at 10 MB and keeps 7 days, zipped.
    """
    logger.remove()
    logger.add(sys.stderr, format=STDERR_FORMAT, level=level, colorize=colorize, diagnose=False)

    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        logger.add(
            log_file, format=FILE_FORMAT, level=level,
            rotation="10 MB", retention="7 days", compression="zip", diagnose=False,
        )
