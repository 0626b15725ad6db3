"""Logging configuration for stokesbddc."""

from __future__ import annotations

import logging
import sys
from typing import Optional, TextIO, Union


def setup_logger(
    name: str = "stokesbddc",
    level: Union[int, str] = logging.INFO,
    format_string: Optional[str] = None,
    stream: Optional[TextIO] = None,
) -> logging.Logger:
    """Set up a logger for stokesbddc components.

    Args:
        name: Logger name
        level: Logging level
        format_string: Custom format string
        stream: Output stream (defaults to stderr)

    Returns:
        Configured logger
    """
    if format_string is None:
        format_string = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    if stream is None:
        stream = sys.stderr

    logger = logging.getLogger(name)
    logger.setLevel(level)

    # Remove existing handlers to avoid duplicates
    for handler in logger.handlers[:]:
        logger.removeHandler(handler)

    handler = logging.StreamHandler(stream)
    handler.setLevel(level)
    handler.setFormatter(logging.Formatter(format_string))

    logger.addHandler(handler)
    logger.propagate = False

    return logger


def get_logger(name: str) -> logging.Logger:
    """Get a logger for a specific component.

    Args:
        name: Component name (will be prefixed with 'stokesbddc.')

    Returns:
        Logger instance
    """
    return logging.getLogger(f"stokesbddc.{name}")


# Default loggers for common components
mesh_logger = get_logger("mesh")
assembly_logger = get_logger("assembly")
decomp_logger = get_logger("decomp")
substructure_logger = get_logger("substructure")
bddc_logger = get_logger("bddc")
krylov_logger = get_logger("krylov")
ilut_logger = get_logger("ilut")
bench_logger = get_logger("bench")
cli_logger = get_logger("cli")
