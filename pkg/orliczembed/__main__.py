"""
Entry point for running orliczembed as a module.

Usage:
    python -m orliczembed verify eq1 --grid 100
    python -m orliczembed distortion --n 2 --seed 7
"""

import sys

from .main import main

if __name__ == "__main__":
    sys.exit(main())
