"""Entry point for running as module: python -m tvreg."""

from .cli import cli

if __name__ == "__main__":
    cli()
