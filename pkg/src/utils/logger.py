"""
Logging utility
"""

import logging
import sys
from pathlib import Path
from typing import Optional, Union


FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'


def setup_logger(name: str, log_file: Optional[str] = None,
                 level: Union[int, str] = logging.INFO) -> logging.Logger:
    """Setup application logger"""

    logger = logging.getLogger(name)
    logger.setLevel(level)

    # Drop handlers installed by an earlier call
    for handler in list(logger.handlers):
        if getattr(handler, '_sdmc_handler', False):
            logger.removeHandler(handler)
            handler.close()

    formatter = logging.Formatter(FORMAT, datefmt=DATE_FORMAT)

    # Console handler
    console_handler = logging.StreamHandler(sys.stdout)
    console_handler.setLevel(level)
    console_handler.setFormatter(formatter)
    console_handler._sdmc_handler = True
    logger.addHandler(console_handler)

    # File handler (optional)
    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)

        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(level)
        file_handler.setFormatter(formatter)
        file_handler._sdmc_handler = True
        logger.addHandler(file_handler)

    logger.propagate = False
    return logger
