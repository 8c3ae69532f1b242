#!/usr/bin/env python3
"""
Backward compatibility entry point for the inelastic Maxwell CLI.
This file simply imports and calls the package CLI.
"""

from src.inelastic_maxwell.__main__ import main

if __name__ == "__main__":
    main()
