#!/usr/bin/env python3
"""
Development entry point; same as the psi-parity console script
"""
import sys

from psi_parity.cli import main

if __name__ == "__main__":
    sys.exit(main())
