"""
Logging configuration for the thermoelastic string/beam laboratory.

Provides structured logging with:
- File logging for persistence of experiment runs
- Console logging for interactive use
- Automatic cleanup of old log files
"""

import logging
import os
import sys
import glob
from pathlib import Path
from datetime import datetime, timedelta
from logging.handlers import RotatingFileHandler


# Log directory (STRINGBEAM_LOG_DIR overrides)
BASE_DIR = Path(__file__).resolve().parents[1]
DEFAULT_LOG_DIR = BASE_DIR / "logs"

# Default: keep logs for 30 days
DEFAULT_LOG_RETENTION_DAYS = 30

LOG_FILE_PREFIX = "lab_"


def get_log_dir() -> Path:
    """Return the log directory, preferring the STRINGBEAM_LOG_DIR variable."""
    override = os.getenv("STRINGBEAM_LOG_DIR")
    if override:
        return Path(override)
    return DEFAULT_LOG_DIR


def cleanup_old_logs(retention_days=DEFAULT_LOG_RETENTION_DAYS, log_dir=None):
    """
    Remove log files older than the specified retention period.

    Args:
        retention_days: Number of days to keep logs (default: 30)
        log_dir: Directory to clean (default: get_log_dir())

    Returns:
        int: Number of files deleted
    """
    log_dir = Path(log_dir) if log_dir is not None else get_log_dir()
    if not log_dir.exists():
        return 0

    cutoff_date = datetime.now() - timedelta(days=retention_days)
    deleted_count = 0
    logger = logging.getLogger(__name__)

    for log_file in glob.glob(str(log_dir / f"{LOG_FILE_PREFIX}*.log")):
        basename = os.path.basename(log_file)
        # lab_YYYYMMDD.log
        date_str = basename[len(LOG_FILE_PREFIX):].replace(".log", "")
        try:
            file_date = datetime.strptime(date_str, "%Y%m%d")
        except ValueError:
            continue

        if file_date >= cutoff_date:
            continue

        try:
            os.remove(log_file)
            deleted_count += 1
            logger.info(f"Deleted old log file: {basename}")
        except OSError as e:
            logger.error(f"Error deleting log file {log_file}: {e}")

    return deleted_count


def setup_logging(level=logging.INFO, log_dir=None, log_to_file=True):
    """
    Configure logging for a laboratory run.

    Args:
        level: Console logging level (default: INFO)
        log_dir: Directory for the rotating log file (default: get_log_dir())
        log_to_file: Disable to keep everything on the console

    Returns:
        Logger instance for the package
    """
    detailed_formatter = logging.Formatter(
        '[%(asctime)s] %(levelname)s in %(module)s (%(funcName)s:%(lineno)d): %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    simple_formatter = logging.Formatter(
        '[%(asctime)s] %(levelname)s: %(message)s',
        datefmt='%H:%M:%S'
    )

    root_logger = logging.getLogger()
    root_logger.setLevel(logging.DEBUG)
    root_logger.handlers.clear()

    if log_to_file:
        log_dir = Path(log_dir) if log_dir is not None else get_log_dir()
        log_dir.mkdir(parents=True, exist_ok=True)
        log_file = log_dir / f"{LOG_FILE_PREFIX}{datetime.now().strftime('%Y%m%d')}.log"
        file_handler = RotatingFileHandler(
            log_file,
            maxBytes=10 * 1024 * 1024,  # 10 MB
            backupCount=5,
            encoding='utf-8'
        )
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(detailed_formatter)
        root_logger.addHandler(file_handler)

    console_handler = logging.StreamHandler(sys.stdout)
    console_handler.setLevel(level)
    console_handler.setFormatter(simple_formatter)
    root_logger.addHandler(console_handler)

    return logging.getLogger("stringbeam")


def get_logger(name: str) -> logging.Logger:
    """
    Get a logger instance with the given name.

    Args:
        name: Logger name (typically __name__ of the module)

    Returns:
        Logger instance
    """
    return logging.getLogger(name)
