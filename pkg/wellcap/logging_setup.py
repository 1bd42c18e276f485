from __future__ import annotations

import logging
import sys

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s %(message)s"



def setup_logging(level: str) -> None:
    # Diagnostics go to stderr; stdout carries the run summary only.
    numeric = logging.getLevelName(level.strip().upper())
    logging.basicConfig(
        level=numeric if isinstance(numeric, int) else logging.INFO,
        format=LOG_FORMAT,
        stream=sys.stderr,
    )
    # Archive SQL stays out of the run log.
    logging.getLogger("sqlalchemy.engine").setLevel(logging.WARNING)
