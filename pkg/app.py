#!/usr/bin/env python3
"""
Backward compatibility entry point for the inelastic Maxwell API.
This file simply imports and calls the API server.
"""

from src.inelastic_maxwell.service.api import start_server

if __name__ == "__main__":
    start_server()
