"""
Logging configuration for the Welch equation toolkit
"""
import functools
import logging
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path
from pythonjsonlogger import jsonlogger
from app.config import settings


def setup_logging():
    """
    Configure logging for the toolkit

    - DEBUG: human-readable lines, handy while stepping through a lift
    - anything else: structured JSON records for scripted runs

    Records always go to stderr; stdout is reserved for reports.
    """
    root_logger = logging.getLogger()
    root_logger.setLevel(getattr(logging, settings.log_level.upper(), logging.WARNING))

    # Remove any existing handlers to prevent duplicate logging
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(root_logger.level)

    if settings.log_level.upper() == "DEBUG":
        formatter = logging.Formatter(
            fmt='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )
    else:
        formatter = jsonlogger.JsonFormatter(
            fmt='%(asctime)s %(name)s %(levelname)s %(message)s %(pathname)s %(lineno)d',
            datefmt='%Y-%m-%dT%H:%M:%S'
        )

    console_handler.setFormatter(formatter)
    root_logger.addHandler(console_handler)

    if settings.log_file:
        setup_file_logging(root_logger, formatter, Path(settings.log_file))

    startup_logger = logging.getLogger("startup")
    startup_logger.debug("Logging system configured successfully")
    startup_logger.debug(f"Log level: {settings.log_level}")


def setup_file_logging(root_logger, formatter, log_path: Path):
    """
    Add a rotating file handler next to the console handler

    Args:
        root_logger: The root logger instance
        formatter: The formatter to use for file output
        log_path: Target log file
    """
    try:
        log_path.parent.mkdir(parents=True, exist_ok=True)

        # 10MB per file, keep 5
        file_handler = RotatingFileHandler(
            filename=log_path,
            maxBytes=10*1024*1024,
            backupCount=5,
            encoding='utf-8'
        )
        file_handler.setLevel(root_logger.level)
        file_handler.setFormatter(formatter)
        root_logger.addHandler(file_handler)

        logging.getLogger("startup").debug(f"File logging configured: {log_path}")

    except Exception as e:
        # Don't crash if file logging fails
        logging.getLogger("startup").warning(f"File logging setup failed: {e}")


def get_logger(name: str) -> logging.Logger:
    """
    Get a logger with the specified name

    Args:
        name: Name of the logger (usually __name__)

    Returns:
        Configured logger instance
    """
    return logging.getLogger(name)


def log_function_call(func):
    """
    Decorator to log solver calls at DEBUG level

    Usage:
        @log_function_call
        def solve_all_pairs(instance):
            ...
    """
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        logger = logging.getLogger(func.__module__)
        logger.debug(f"Calling {func.__name__} with args={args}, kwargs={kwargs}")

        try:
            result = func(*args, **kwargs)
            logger.debug(f"{func.__name__} returned: {result!r}")
            return result
        except Exception as e:
            logger.error(f"{func.__name__} raised {type(e).__name__}: {e}")
            raise

    return wrapper
