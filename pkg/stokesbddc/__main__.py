#!/usr/bin/env python3
"""stokesbddc CLI entry point for python -m stokesbddc."""

from .cli import app

if __name__ == "__main__":
    app()
