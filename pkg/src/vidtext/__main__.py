"""Module entry point: `python -m vidtext` behaves like the console script."""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
