"""Command-line surface: `oodlab <command>` or `python -m oodlab <command>`."""

from .main import build_parser, main, run

__all__ = ["build_parser", "main", "run"]
