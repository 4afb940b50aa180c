"""
Exhaustive search for the coarsest lumpable partition, for small chains.
"""

import logging
from typing import Iterator, List

from markov_compress.compression.quotient import verify_lumpability
from markov_compress.compression.refinement import Partition
from markov_compress.errors import LumpabilityError, OracleSizeError, UniquenessViolation
from markov_compress.models.chain import DEFAULT_EPSILON, ROW_TOLERANCE, ChainSpec, TargetSpec, ensure_valid

logger = logging.getLogger(__name__)

ORACLE_MAX_STATES = 12


def set_partitions(size: int, blocks: int) -> Iterator[List[int]]:
    """Restricted growth strings of length `size` using exactly `blocks` values."""
    if size == 0:
        if blocks == 0:
            yield []
        return
    if not 1 <= blocks <= size:
        return
    labels = [0] * size

    def extend(position: int, used: int) -> Iterator[List[int]]:
        if position == size:
            if used == blocks:
                yield list(labels)
            return
        # leave room for the blocks still to open
        if size - position < blocks - used:
            return
        for value in range(min(used + 1, blocks)):
            labels[position] = value
            yield from extend(position + 1, max(used, value + 1))

    yield from extend(1, 1)


def brute_force_minimal(
    chain: ChainSpec,
    targets: TargetSpec,
    epsilon: float = DEFAULT_EPSILON,
    max_states: int = ORACLE_MAX_STATES,
    tolerance: float = ROW_TOLERANCE
) -> Partition:
    """Lumpable partition with the fewest blocks, found by enumeration.

    Partitions of the non-target states are tried by increasing block count,
    with every target class adjoined as its own block.

    Raises:
        OracleSizeError: if the chain has more than `max_states` states
        UniquenessViolation: if two lumpable partitions share the minimum
    """
    if chain.size > max_states:
        raise OracleSizeError(f"oracle limited to {max_states} states, chain has {chain.size}")
    ensure_valid(chain, targets, tolerance)

    rest = [e for e in range(chain.size) if targets.class_of(e) is None]
    keys: List[object] = [("target", targets.class_of(e)) for e in range(chain.size)]
    for blocks in range(1 if rest else 0, len(rest) + 1):
        found: List[Partition] = []
        for labels in set_partitions(len(rest), blocks):
            for e, label in zip(rest, labels):
                keys[e] = ("rest", label)
            candidate = Partition.from_keys(keys)
            if verify_lumpability(chain, candidate, targets, epsilon):
                found.append(candidate)
        if len(found) > 1:
            logger.error(f"Oracle found {len(found)} minimal lumpable partitions with {blocks} non-target blocks")
            raise UniquenessViolation(
                f"{len(found)} lumpable partitions with {found[0].block_count} blocks"
            )
        if found:
            logger.debug(f"Oracle minimum reached with {found[0].block_count} blocks")
            return found[0]
    # the finest partition is always lumpable once targets are closed
    raise LumpabilityError("no lumpable partition found")
