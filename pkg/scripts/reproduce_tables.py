"""Recompute every tabulated lattice row and compare with the stored expectations.

Usage: python3 scripts/reproduce_tables.py [--out tables.json] [ROW ...]
"""

from __future__ import annotations

import sys

from covmax import cli

if __name__ == "__main__":
    sys.exit(cli.main(["tables", *sys.argv[1:]]))
