"""
Chain types and the document schema.
"""

from markov_compress.models.chain import (
    ChainSpec,
    NumericMode,
    TargetClass,
    TargetSpec,
    Violation,
    ensure_valid,
    validate_chain,
)
from markov_compress.models.schemas import ChainDocument

__all__ = [
    "ChainDocument",
    "ChainSpec",
    "NumericMode",
    "TargetClass",
    "TargetSpec",
    "Violation",
    "ensure_valid",
    "validate_chain",
]
