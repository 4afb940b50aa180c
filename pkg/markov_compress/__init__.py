"""
Compression of absorbing Markov chains by monotone partition refinement.
"""

from markov_compress.compression.quotient import build_quotient
from markov_compress.compression.refinement import Partition, compress, markov_complexity
from markov_compress.models.chain import ChainSpec, NumericMode, TargetSpec

__version__ = "0.1.0"
__all__ = [
    "ChainSpec",
    "NumericMode",
    "Partition",
    "TargetSpec",
    "build_quotient",
    "compress",
    "markov_complexity",
]
