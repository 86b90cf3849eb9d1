"""Точка входа: python -m frogrange."""

from frogrange.cli import main

main()
