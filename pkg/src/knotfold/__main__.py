"""Module entry point: python -m knotfold."""

from .cli import run

run()
