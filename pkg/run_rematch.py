#!/usr/bin/env python3
"""
AMR Rematch Entry Point

Simple entry point that runs the amr-rematch command line.
"""

from amr_rematch import main

if __name__ == "__main__":
    main()
