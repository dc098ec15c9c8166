"""
cosettree — entry point.

Run with:  python -m cosettree <command> ...
           cosettree serve      (HTTP service via uvicorn)
"""

import sys

from cosettree.cli import main

if __name__ == "__main__":
    sys.exit(main())
