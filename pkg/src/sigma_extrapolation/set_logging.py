import logging
import os
from datetime import datetime
from pathlib import Path

LOG_FORMAT = "%(asctime)s:%(name)s:%(levelname)s:%(message)s"

_configured_file: Path | None = None


def configure_logging(level: str | None = None, log_dir: str | Path = "logs") -> Path:
    """Set up file + console logging on the root logger once; returns the log file path."""
    global _configured_file
    level = (level or os.getenv("LOG_LEVEL", "INFO")).upper()
    root = logging.getLogger()
    root.setLevel(level)
    if _configured_file is not None:
        for handler in root.handlers:
            handler.setLevel(level)
        return _configured_file

    ## Add folder for logging
    log_dir = Path(log_dir)
    log_dir.mkdir(parents=True, exist_ok=True)

    ## Add timestamp for logfiles
    timestamp = datetime.now().strftime("%Y-%m-%d_%H-%M-%S")
    log_file = log_dir / f"{timestamp}_sigma.log"

    file_handler = logging.FileHandler(log_file, mode="w")
    file_handler.setLevel(level)
    file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(file_handler)

    console = logging.StreamHandler()
    console.setLevel(level)
    console.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(console)

    _configured_file = log_file
    return log_file
