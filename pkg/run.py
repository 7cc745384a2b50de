#!/usr/bin/env python3
"""
Squeezing Simulator - Main Entry Point

Run the command-line interface, for example:
    python run.py figure fig1
    python run.py verify
"""

import sys
from pathlib import Path

# Add src directory to Python path
src_path = Path(__file__).parent / 'src'
sys.path.insert(0, str(src_path))

from cli import main  # noqa: E402

if __name__ == '__main__':
    sys.exit(main())
