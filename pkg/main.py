#!/usr/bin/env python3
"""
Secure Distributed Matrix Computation Toolkit
Command-line entry point

License: MIT
"""

import sys

from src.cli.commands import run
from src.utils.config import get_settings
from src.utils.logger import setup_logger


def main(argv=None) -> int:
    """Application entry point"""

    settings = get_settings()
    logger = setup_logger('src', settings.log_file, settings.log_level)
    logger.debug('Starting sdmc')

    try:
        exit_code = run(argv)
    except Exception as e:
        logger.error(f'sdmc crashed: {e}', exc_info=True)
        return 1
    logger.debug(f'sdmc exited with code {exit_code}')
    return exit_code


if __name__ == '__main__':
    sys.exit(main())
