"""
NJPO simulator - command-line entry point.

Usage:
    python app.py steady-state
    python app.py simulate --seed 7 --out runs
    python app.py map --config my_run.cfg --workers 4
"""

import sys

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
