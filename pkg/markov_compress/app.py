"""
Run the chain compressor from the command line.
"""

import logging
import sys
from typing import Optional, Sequence

import click
from pythonjsonlogger import jsonlogger

from markov_compress.cli.commands import CompressorCLI
from markov_compress.config import Settings, get_settings


def configure_logging(settings: Settings) -> None:
    """Send log records to stderr, as text or as JSON lines."""
    if settings.log_json:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(jsonlogger.JsonFormatter(settings.log_format))
        logging.basicConfig(level=settings.log_level, handlers=[handler], force=True)
    else:
        logging.basicConfig(level=settings.log_level, format=settings.log_format, stream=sys.stderr, force=True)


def create_cli(settings: Optional[Settings] = None) -> click.Group:
    """Create the command group."""
    settings = settings or get_settings()
    configure_logging(settings)
    logger = logging.getLogger(__name__)

    cli = CompressorCLI(settings)

    logger.debug(f"Commands registered: {', '.join(sorted(cli.get_group().commands))}")
    return cli.get_group()


def main(argv: Optional[Sequence[str]] = None) -> None:
    """Run the command group."""
    create_cli().main(args=list(argv) if argv is not None else None, prog_name="markov-compress")


if __name__ == "__main__":
    main()
