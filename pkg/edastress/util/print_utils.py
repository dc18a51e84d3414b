"""Utilities for pretty-printing text and configuring console logging."""

import logging
import sys


class Colors:
    HEADER = '\033[95m'
    OKBLUE = '\033[94m'
    OKGREEN = '\033[92m'
    WARNING = '\033[93m'
    FAIL = '\033[91m'
    ENDC = '\033[0m'
    BOLD = '\033[1m'
    UNDERLINE = '\033[4m'


_LEVEL_COLORS = {
    logging.DEBUG: Colors.OKBLUE,
    logging.WARNING: Colors.WARNING,
    logging.ERROR: Colors.FAIL,
    logging.CRITICAL: Colors.FAIL + Colors.BOLD,
}


class ColorFormatter(logging.Formatter):
    """Colours the whole record by level when writing to a terminal."""

    def __init__(self, fmt, use_color=True):
        super(ColorFormatter, self).__init__(fmt)
        self._use_color = use_color

    def format(self, record):
        text = super(ColorFormatter, self).format(record)
        color = _LEVEL_COLORS.get(record.levelno)
        if self._use_color and color:
            return color + text + Colors.ENDC
        return text


def setup_logging(level='INFO', stream=None):
    """Installs a single coloured console handler on the package logger."""
    stream = stream or sys.stderr
    handler = logging.StreamHandler(stream)
    handler.setFormatter(ColorFormatter(
        '%(levelname)s %(name)s: %(message)s',
        use_color=hasattr(stream, 'isatty') and stream.isatty(),
    ))
    logger = logging.getLogger('edastress')
    for old in list(logger.handlers):
        if not isinstance(old, logging.NullHandler):
            logger.removeHandler(old)
    logger.addHandler(handler)
    logger.setLevel(level.upper() if isinstance(level, str) else level)
    return logger


def print_green(text):
    print(Colors.OKGREEN + text + Colors.ENDC)

def print_red(text):
    print(Colors.FAIL + text + Colors.ENDC)

def print_blue(text):
    print(Colors.OKBLUE + text + Colors.ENDC)
