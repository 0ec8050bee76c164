#!/usr/bin/env python3
"""
ScoreCraft - Startup Script
Run this script with a subcommand, e.g. `python run.py synth --n 1000 --out data.csv`
"""

import sys

from app import app

if __name__ == '__main__':
    try:
        app(prog_name='scorecraft')
    except KeyboardInterrupt:
        print("\nStopped by user", file=sys.stderr)
        sys.exit(130)
