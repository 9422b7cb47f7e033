import logging
from typing import Optional

from gradb.core.config import settings


def configure_logging(verbosity: int = 0, level: Optional[str] = None) -> None:
    """Configure root logging for a CLI invocation"""
    if level is None:
        if verbosity >= 2:
            level = "DEBUG"
        elif verbosity == 1:
            level = "INFO"
        else:
            level = settings.LOG_LEVEL

    logging.basicConfig(level=getattr(logging, level.upper(), logging.WARNING), format=settings.LOG_FORMAT, force=True)
