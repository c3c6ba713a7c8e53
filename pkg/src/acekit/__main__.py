"""Allow running acekit as `python -m acekit`."""

from acekit.cli.app import run

run()
