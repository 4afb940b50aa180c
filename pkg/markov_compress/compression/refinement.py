"""
Partition refinement towards the coarsest lumpable partition.
"""

import logging
from dataclasses import dataclass
from functools import cmp_to_key
from typing import Dict, Hashable, List, NamedTuple, Sequence, Tuple

from markov_compress.errors import InputError
from markov_compress.models.chain import (
    DEFAULT_EPSILON,
    ROW_TOLERANCE,
    ChainSpec,
    NumericMode,
    TargetSpec,
    Value,
    ensure_valid,
    zero,
)

logger = logging.getLogger(__name__)

# Sparse vector of block masses, sorted by block id
Signature = Tuple[Tuple[int, Value], ...]


@dataclass(frozen=True)
class Partition:
    """Equivalence relation on states as a canonical block assignment.

    Blocks are numbered by their smallest member, so the block holding
    state 0 is block 0 and two partitions are equal iff their assignments are.
    """
    assignment: Tuple[int, ...]
    block_count: int

    @classmethod
    def from_keys(cls, keys: Sequence[Hashable]) -> "Partition":
        """States with equal keys share a block."""
        ids: Dict[Hashable, int] = {}
        assignment = []
        for key in keys:
            if key not in ids:
                ids[key] = len(ids)
            assignment.append(ids[key])
        return cls(assignment=tuple(assignment), block_count=len(ids))

    @classmethod
    def finest(cls, size: int) -> "Partition":
        return cls(assignment=tuple(range(size)), block_count=size)

    @classmethod
    def coarsest(cls, size: int) -> "Partition":
        return cls(assignment=(0,) * size, block_count=1 if size else 0)

    @property
    def size(self) -> int:
        return len(self.assignment)

    def blocks(self) -> List[List[int]]:
        members: List[List[int]] = [[] for _ in range(self.block_count)]
        for e, block in enumerate(self.assignment):
            members[block].append(e)
        return members

    def is_canonical(self) -> bool:
        return Partition.from_keys(self.assignment) == self

    def refines(self, other: "Partition") -> bool:
        """True if every block of self lies inside a block of other."""
        if self.size != other.size:
            raise InputError(f"partitions over {self.size} and {other.size} states")
        image: Dict[int, int] = {}
        for mine, theirs in zip(self.assignment, other.assignment):
            if image.setdefault(mine, theirs) != theirs:
                return False
        return True

    def permuted(self, perm: Sequence[int]) -> "Partition":
        """The same relation after state e is renamed perm[e]."""
        keys = [0] * self.size
        for e, block in enumerate(self.assignment):
            keys[perm[e]] = block
        return Partition.from_keys(keys)


class CompressionResult(NamedTuple):
    partition: Partition
    steps: int


def check_partition(chain: ChainSpec, partition: Partition) -> None:
    if partition.size != chain.size:
        raise InputError(f"partition covers {partition.size} states, chain has {chain.size}")
    if not partition.is_canonical():
        raise InputError("partition is not canonically numbered")


def initial_partition(chain: ChainSpec, targets: TargetSpec, tolerance: float = ROW_TOLERANCE) -> Partition:
    """Each target class as its own block plus one block for the rest."""
    ensure_valid(chain, targets, tolerance)
    return Partition.from_keys([
        ("target", index) if index is not None else ("rest",)
        for index in (targets.class_of(e) for e in range(chain.size))
    ])


def signature(chain: ChainSpec, partition: Partition, e: int) -> Signature:
    """Mass from e into every block of the partition."""
    masses: Dict[int, Value] = {}
    for destination, value in chain.rows[e]:
        block = partition.assignment[destination]
        masses[block] = masses.get(block, zero(chain.mode)) + value
    return tuple(sorted(masses.items()))


def signatures(chain: ChainSpec, partition: Partition) -> List[Signature]:
    check_partition(chain, partition)
    return [signature(chain, partition, e) for e in range(chain.size)]


def _compare(left: Signature, right: Signature) -> int:
    """Lexicographic order of the dense vectors behind two signatures."""
    i = j = 0
    while i < len(left) or j < len(right):
        left_block = left[i][0] if i < len(left) else None
        right_block = right[j][0] if j < len(right) else None
        if right_block is None or (left_block is not None and left_block < right_block):
            left_value, right_value = left[i][1], 0.0
            i += 1
        elif left_block is None or right_block < left_block:
            left_value, right_value = 0.0, right[j][1]
            j += 1
        else:
            left_value, right_value = left[i][1], right[j][1]
            i += 1
            j += 1
        if left_value != right_value:
            return -1 if left_value < right_value else 1
    return 0


def signature_distance(left: Signature, right: Signature) -> float:
    """Largest componentwise gap between two signatures."""
    gaps: Dict[int, float] = {block: float(value) for block, value in left}
    for block, value in right:
        gaps[block] = gaps.get(block, 0.0) - float(value)
    return max((abs(gap) for gap in gaps.values()), default=0.0)


def refine_once(chain: ChainSpec, partition: Partition, epsilon: float = DEFAULT_EPSILON) -> Partition:
    """Split every block by the block masses of its members.

    Exact chains split on equality of signatures. Float chains sort each
    block lexicographically by signature; each member joins the first
    sub-block whose anchor (its first member) lies within epsilon, and
    otherwise opens a new sub-block anchored at itself.
    """
    sigs = signatures(chain, partition)
    if chain.mode == NumericMode.EXACT:
        return Partition.from_keys([(partition.assignment[e], sigs[e]) for e in range(chain.size)])

    keys: List[Tuple[int, int]] = [(0, 0)] * chain.size
    for block, members in enumerate(partition.blocks()):
        ordered = sorted(members, key=cmp_to_key(lambda a, b: _compare(sigs[a], sigs[b])))
        anchors: List[int] = []
        for e in ordered:
            # members within epsilon of an anchor may sit on both sides of an unrelated state
            sub_block = next(
                (i for i, anchor in enumerate(anchors) if signature_distance(sigs[anchor], sigs[e]) <= epsilon),
                None
            )
            if sub_block is None:
                sub_block = len(anchors)
                anchors.append(e)
            keys[e] = (block, sub_block)
    return Partition.from_keys(keys)


def refinement_trace(
    chain: ChainSpec,
    targets: TargetSpec,
    epsilon: float = DEFAULT_EPSILON,
    tolerance: float = ROW_TOLERANCE
) -> List[Partition]:
    """The iterates from the initial partition up to the fixed point."""
    trace = [initial_partition(chain, targets, tolerance)]
    while True:
        refined = refine_once(chain, trace[-1], epsilon)
        logger.debug(f"Refinement step {len(trace)}: {trace[-1].block_count} -> {refined.block_count} blocks")
        if refined == trace[-1]:
            return trace
        trace.append(refined)


def compress(
    chain: ChainSpec,
    targets: TargetSpec,
    epsilon: float = DEFAULT_EPSILON,
    tolerance: float = ROW_TOLERANCE
) -> CompressionResult:
    """Coarsest lumpable partition keeping each target class as one block.

    Returns:
        The fixed point and the number of refinement steps that changed the
        partition before it stabilized.
    """
    trace = refinement_trace(chain, targets, epsilon, tolerance)
    result = CompressionResult(partition=trace[-1], steps=len(trace) - 1)
    logger.info(f"Compressed {chain.size} states to {result.partition.block_count} blocks in {result.steps} steps")
    return result


def markov_complexity(
    chain: ChainSpec,
    targets: TargetSpec,
    epsilon: float = DEFAULT_EPSILON,
    tolerance: float = ROW_TOLERANCE
) -> int:
    return compress(chain, targets, epsilon, tolerance).partition.block_count


def intersect_partitions(parts: Sequence[Partition]) -> Partition:
    """Coarsest partition refining every input."""
    if not parts:
        raise InputError("no partitions to intersect")
    size = parts[0].size
    for part in parts:
        if part.size != size:
            raise InputError(f"partitions over {size} and {part.size} states")
    return Partition.from_keys([tuple(part.assignment[e] for part in parts) for e in range(size)])


def compress_per_target(
    chain: ChainSpec,
    targets: TargetSpec,
    epsilon: float = DEFAULT_EPSILON,
    tolerance: float = ROW_TOLERANCE
) -> List[Partition]:
    """One compression for each target class taken alone."""
    return [
        compress(chain, targets.single(i), epsilon, tolerance).partition
        for i in range(len(targets))
    ]
