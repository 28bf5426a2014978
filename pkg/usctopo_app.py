#!/usr/bin/env python3
"""
usctopo command-line entry point (runs from a source checkout).
"""

import sys
from pathlib import Path

# Add src to path for imports
src_path = Path(__file__).parent / "src"
sys.path.insert(0, str(src_path))

from usctopo.cli.app import main

if __name__ == "__main__":
    sys.exit(main())
