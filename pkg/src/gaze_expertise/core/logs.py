# File: src/gaze_expertise/core/logs.py

import logging
from pathlib import Path

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: str | int = "INFO", log_file: Path | str | None = None) -> logging.Logger:
    """
    Installs the run's handlers on the root logger: stderr, plus an optional log file.
    Any pre-existing root handlers are removed so messages are not duplicated.
    """
    logger = logging.getLogger()
    logger.setLevel(level if isinstance(level, int) else level.upper())
    for handler in logger.handlers[:]:
        logger.removeHandler(handler)
        handler.close()

    formatter = logging.Formatter(LOG_FORMAT)
    console = logging.StreamHandler()
    console.setFormatter(formatter)
    logger.addHandler(console)

    if log_file is not None:
        path = Path(log_file)
        path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(path, mode="w", encoding="utf-8")
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)
    return logger
