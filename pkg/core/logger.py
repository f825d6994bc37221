"""
Centralized logging system for GeoPursuit.
Geometry, game and verification code log here at DEBUG; the UI helpers
mirror console output into the same file.
"""
import logging
import os
from logging.handlers import RotatingFileHandler
from pathlib import Path

LOG_FILENAME = "geopursuit.log"
MAX_LOG_SIZE = 5 * 1024 * 1024  # 5 MB
BACKUP_COUNT = 3

# sweep workers share the file, so every record names its process
LOG_FORMAT = '%(asctime)s - %(levelname)s - %(processName)s - [%(filename)s:%(lineno)d] - %(message)s'


def log_directory() -> Path:
    """GEOPURSUIT_LOG_DIR when set, otherwise the project root"""
    override = os.getenv("GEOPURSUIT_LOG_DIR")
    return Path(override) if override else Path(__file__).resolve().parent.parent


def setup_logger(name: str = "GeoPursuit") -> logging.Logger:
    """Configure the project logger once; later calls return it unchanged"""
    logger = logging.getLogger(name)
    logger.setLevel(logging.DEBUG)
    if logger.handlers:
        return logger

    log_path = log_directory() / LOG_FILENAME
    try:
        handler = RotatingFileHandler(log_path, maxBytes=MAX_LOG_SIZE, backupCount=BACKUP_COUNT, encoding='utf-8')
        handler.setLevel(logging.DEBUG)
        handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt='%Y-%m-%d %H:%M:%S'))
        logger.addHandler(handler)
    except OSError as e:
        # read-only checkout: run without a file log
        logger.addHandler(logging.NullHandler())
        logging.getLogger(__name__).warning(f"Failed to setup logging to {log_path}: {e}")

    return logger


# Singleton logger instance
log = setup_logger()
