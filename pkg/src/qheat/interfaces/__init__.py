"""
Command-line interface for qheat.
"""

from .cli import build_parser, main

__all__ = ["main", "build_parser"]
