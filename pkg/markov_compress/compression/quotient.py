"""
Quotient chains built from lumpable partitions.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from markov_compress.compression.refinement import Partition, check_partition, signature_distance, signature
from markov_compress.errors import LumpabilityError
from markov_compress.models.chain import (
    DEFAULT_EPSILON,
    ChainSpec,
    NumericMode,
    TargetClass,
    TargetSpec,
    Value,
    Violation,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuotientResult:
    """Projection onto the blocks and the chain it induces."""
    projection: Tuple[int, ...]
    quotient_chain: ChainSpec
    quotient_targets: TargetSpec

    @property
    def quotient_labels(self) -> Tuple[str, ...]:
        return self.quotient_chain.labels


def quotient_row(chain: ChainSpec, partition: Partition, e: int) -> Dict[int, Value]:
    """Row of the quotient chain as seen from member e."""
    chain.check_state(e)
    return dict(signature(chain, partition, e))


def lumpability_violation(
    chain: ChainSpec,
    partition: Partition,
    targets: TargetSpec,
    epsilon: float = DEFAULT_EPSILON
) -> Optional[Violation]:
    """First reason the partition is not lumpable, or None.

    Checks that every target class is exactly one block and that members of
    a block carry equal masses into every block.
    """
    check_partition(chain, partition)
    blocks = partition.blocks()
    for target in targets.classes:
        owners = {partition.assignment[e] for e in target.states}
        if len(owners) != 1:
            return Violation("target", f"target class {target.name} is split over {len(owners)} blocks")
        block = owners.pop()
        if set(blocks[block]) != set(target.states):
            intruder = min(set(blocks[block]) - target.states)
            return Violation(
                "target",
                f"target class {target.name} shares its block with state {chain.labels[intruder]}",
                intruder
            )

    for block, members in enumerate(blocks):
        first = signature(chain, partition, members[0])
        for e in members[1:]:
            other = signature(chain, partition, e)
            if chain.mode == NumericMode.EXACT:
                if other == first:
                    continue
                masses = dict(first)
                theirs = dict(other)
                differing = min(b for b in set(masses) | set(theirs) if masses.get(b, 0) != theirs.get(b, 0))
            else:
                if signature_distance(first, other) <= epsilon:
                    continue
                masses = dict(first)
                theirs = dict(other)
                differing = max(
                    set(masses) | set(theirs),
                    key=lambda b: abs(float(masses.get(b, 0.0)) - float(theirs.get(b, 0.0)))
                )
            return Violation(
                "lumpability",
                f"states {chain.labels[members[0]]} and {chain.labels[e]} share block {block} "
                f"but differ in mass into block {differing}",
                e
            )
    return None


def verify_lumpability(
    chain: ChainSpec,
    partition: Partition,
    targets: TargetSpec,
    epsilon: float = DEFAULT_EPSILON
) -> bool:
    return lumpability_violation(chain, partition, targets, epsilon) is None


def _block_labels(partition: Partition, targets: TargetSpec) -> List[str]:
    """Target names for target blocks, f1, f2, ... for the others."""
    reserved = set(targets.names)
    labels: List[str] = []
    counter = 0
    for members in partition.blocks():
        index = targets.class_of(members[0])
        if index is not None:
            labels.append(targets.classes[index].name)
            continue
        counter += 1
        while f"f{counter}" in reserved:
            counter += 1
        labels.append(f"f{counter}")
    return labels


def build_quotient(
    chain: ChainSpec,
    partition: Partition,
    targets: TargetSpec,
    epsilon: float = DEFAULT_EPSILON,
    check: bool = True
) -> QuotientResult:
    """Compressed chain on the blocks of a lumpable partition.

    Each quotient row is read from the smallest member of its block.
    With check=False the lumpability precondition is skipped, which
    projects arbitrary partitions (used to measure how badly they fail).

    Raises:
        LumpabilityError: if the partition is not lumpable
    """
    check_partition(chain, partition)
    violation = lumpability_violation(chain, partition, targets, epsilon) if check else None
    if violation is not None:
        logger.error(f"Cannot build quotient: {violation}")
        raise LumpabilityError(violation.message)

    blocks = partition.blocks()
    rows = [quotient_row(chain, partition, members[0]) for members in blocks]
    quotient_chain = ChainSpec.build(_block_labels(partition, targets), rows, chain.mode)
    quotient_targets = TargetSpec(classes=tuple(
        TargetClass(name=target.name, states=frozenset({partition.assignment[min(target.states)]}))
        for target in targets.classes
    ))
    return QuotientResult(
        projection=partition.assignment,
        quotient_chain=quotient_chain,
        quotient_targets=quotient_targets,
    )
