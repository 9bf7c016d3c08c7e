"""
Command-line entry point for the trace semantics toolkit.

    python main.py trace corpus/running-nd.sys --state x --depth 6
    python main.py equiv classic x y --depth 8
    python main.py check-laws --seed 0
"""

import sys

from app.cli import main


if __name__ == "__main__":
    sys.exit(main())
