"""Root logger configuration for command-line runs."""
import logging
import sys

from config import LOG_DATEFMT, LOG_FORMAT, LOG_LEVEL


def setup_logging(verbose: bool = False, quiet: bool = False) -> int:
    """Send log records to stderr; --verbose means DEBUG and --quiet WARNING.

    Returns:
        The level that was set
    """
    if verbose:
        level = logging.DEBUG
    elif quiet:
        level = logging.WARNING
    else:
        level = logging.getLevelName(str(LOG_LEVEL).upper())
        if not isinstance(level, int):
            level = logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT, datefmt=LOG_DATEFMT, stream=sys.stderr, force=True)
    return level
