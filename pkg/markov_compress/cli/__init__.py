"""
Command-line surface: chain documents, DOT export and commands.
"""

from markov_compress.cli.commands import CompressorCLI

__all__ = ["CompressorCLI"]
