#!/usr/bin/env python3
"""
Welch equation toolkit - command-line entry point
=================================================

Solves and counts g^(x-1+c) = x (mod p^e) constructively, through the
Teichmuller decomposition, p-adic log/exp and Hensel lifting, and checks
every counting and symmetry theorem against brute-force scans.
"""

import os
import sys

# Ensure the app module can be found
current_dir = os.path.dirname(os.path.abspath(__file__))
if current_dir not in sys.path:
    sys.path.insert(0, current_dir)

from app.cli import main
from app.config import settings
from app.utils.logger import get_logger, setup_logging

setup_logging()
logger = get_logger(__name__)


if __name__ == "__main__":
    if not settings.validate_settings():
        logger.error(f"Invalid configuration: {settings!r}")
        sys.exit(2)
    logger.debug(f"Starting with {settings!r}")
    sys.exit(main())
