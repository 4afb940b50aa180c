"""
Core chain types: numeric modes, the chain, its target classes and validation.
"""

import logging
import math
import re
from dataclasses import dataclass
from decimal import Decimal
from enum import Enum
from fractions import Fraction
from typing import Collection, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from markov_compress.errors import InputError, InvalidChainError

logger = logging.getLogger(__name__)

Value = Union[Fraction, float]

# Float-mode slack on row sums and probability bounds
ROW_TOLERANCE = 1e-12
# Float-mode tolerance when comparing block masses
DEFAULT_EPSILON = 1e-9

_EXACT_PATTERN = re.compile(r"^[+-]?\d+/\d+$")
_INTEGER_PATTERN = re.compile(r"^[+-]?\d+$")


class NumericMode(str, Enum):
    """Arithmetic used by every entry of a chain."""
    EXACT = "exact"
    FLOAT = "float"


def zero(mode: NumericMode) -> Value:
    return Fraction(0) if mode == NumericMode.EXACT else 0.0


def one(mode: NumericMode) -> Value:
    return Fraction(1) if mode == NumericMode.EXACT else 1.0


def parse_numeric(text: str) -> Tuple[Value, Optional[NumericMode]]:
    """Parse a probability literal.

    Args:
        text: "a/b", an integer, or a decimal literal

    Returns:
        The value and the mode its style implies; integers imply no mode
        and are returned as exact values.

    Raises:
        ValueError: if the literal is not a finite number
    """
    literal = text.strip()
    if _EXACT_PATTERN.match(literal):
        numerator, denominator = literal.split("/")
        if int(denominator) == 0:
            raise ValueError(f"zero denominator in '{text}'")
        return Fraction(int(numerator), int(denominator)), NumericMode.EXACT
    if _INTEGER_PATTERN.match(literal):
        return Fraction(int(literal)), None
    try:
        value = float(literal)
    except ValueError:
        raise ValueError(f"'{text}' is not a probability literal")
    if not math.isfinite(value):
        raise ValueError(f"'{text}' is not finite")
    return value, NumericMode.FLOAT


def coerce_numeric(value: Union[Value, int, str, Decimal], mode: NumericMode) -> Value:
    """Convert a value to the representation used by `mode`."""
    if isinstance(value, bool):
        raise InputError(f"boolean {value!r} is not a probability")
    if isinstance(value, str):
        value, _ = parse_numeric(value)
    if mode == NumericMode.EXACT:
        if isinstance(value, float):
            # decimal reading of the float, so 0.3 becomes 3/10
            return Fraction(repr(value))
        return Fraction(value)
    return float(value)


def infer_mode(values: Iterable[Union[Value, int, str]]) -> NumericMode:
    """Exact unless some value is a float or a decimal literal."""
    for value in values:
        if isinstance(value, float):
            return NumericMode.FLOAT
        if isinstance(value, str) and parse_numeric(value)[1] == NumericMode.FLOAT:
            return NumericMode.FLOAT
    return NumericMode.EXACT


def format_numeric(value: Value, mode: NumericMode) -> str:
    """Exact values always as "a/b", floats as their shortest repr."""
    if mode == NumericMode.EXACT:
        value = Fraction(value)
        return f"{value.numerator}/{value.denominator}"
    return repr(float(value))


@dataclass(frozen=True)
class ChainSpec:
    """A finite chain in canonical sparse form.

    Row e holds (destination, probability) pairs sorted by destination,
    with zero entries dropped.
    """
    labels: Tuple[str, ...]
    rows: Tuple[Tuple[Tuple[int, Value], ...], ...]
    mode: NumericMode = NumericMode.EXACT

    @classmethod
    def build(
        cls,
        labels: Sequence[str],
        rows: Sequence[Union[Mapping[int, object], Sequence[object]]],
        mode: NumericMode = NumericMode.EXACT
    ) -> "ChainSpec":
        """Build a chain from sparse mappings or dense sequences.

        Args:
            labels: State names, one per state
            rows: Per state, a mapping destination -> probability or a dense row
            mode: Numeric mode shared by all entries

        Returns:
            The canonical chain
        """
        mode = NumericMode(mode)
        size = len(labels)
        if len(rows) != size:
            raise InputError(f"{len(rows)} rows given for {size} states")
        canonical = []
        for e, row in enumerate(rows):
            items = row.items() if isinstance(row, Mapping) else enumerate(row)
            entries: Dict[int, Value] = {}
            for destination, value in items:
                destination = int(destination)
                if not 0 <= destination < size:
                    raise InputError(f"row {e} points to unknown state {destination}")
                entries[destination] = entries.get(destination, zero(mode)) + coerce_numeric(value, mode)
            canonical.append(tuple(sorted((d, v) for d, v in entries.items() if v != 0)))
        return cls(labels=tuple(str(label) for label in labels), rows=tuple(canonical), mode=mode)

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def nnz(self) -> int:
        return sum(len(row) for row in self.rows)

    def row(self, e: int) -> Dict[int, Value]:
        self.check_state(e)
        return dict(self.rows[e])

    def check_state(self, e: int) -> None:
        if not isinstance(e, int) or not 0 <= e < self.size:
            raise InputError(f"state id {e!r} out of range 0..{self.size - 1}")

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise InputError(f"unknown label '{label}'")


@dataclass(frozen=True)
class TargetClass:
    """A named closed class of target states."""
    name: str
    states: FrozenSet[int]


@dataclass(frozen=True)
class TargetSpec:
    """Disjoint target classes T_1..T_k."""
    classes: Tuple[TargetClass, ...]

    @classmethod
    def build(
        cls,
        classes: Union[Mapping[str, Iterable[int]], Sequence[Tuple[str, Iterable[int]]]]
    ) -> "TargetSpec":
        items = classes.items() if isinstance(classes, Mapping) else classes
        return cls(classes=tuple(
            TargetClass(name=str(name), states=frozenset(int(e) for e in states))
            for name, states in items
        ))

    def __len__(self) -> int:
        return len(self.classes)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(target.name for target in self.classes)

    @property
    def target_states(self) -> FrozenSet[int]:
        return frozenset().union(*(target.states for target in self.classes))

    def class_of(self, e: int) -> Optional[int]:
        """Index of the class containing e, or None for non-target states."""
        for i, target in enumerate(self.classes):
            if e in target.states:
                return i
        return None

    def single(self, i: int) -> "TargetSpec":
        """The problem keeping only class i as a target."""
        return TargetSpec(classes=(self.classes[i],))

    def merged(self, name: str = "T") -> "TargetSpec":
        """All classes joined into one."""
        return TargetSpec(classes=(TargetClass(name=name, states=self.target_states),))


@dataclass(frozen=True)
class Violation:
    """One violated invariant of a chain or its targets."""
    kind: str
    message: str
    state: Optional[int] = None

    def __str__(self) -> str:
        return self.message


def validate_chain(
    chain: ChainSpec,
    targets: TargetSpec,
    tolerance: float = ROW_TOLERANCE
) -> List[Violation]:
    """Report every violated invariant of the chain and its targets.

    Args:
        chain: Chain to check
        targets: Target classes to check against the chain
        tolerance: Float-mode slack on row sums and probability bounds

    Returns:
        List of violations, empty iff the inputs are valid
    """
    report: List[Violation] = []
    exact = chain.mode == NumericMode.EXACT
    size = chain.size

    def name(e: int) -> str:
        return chain.labels[e] if 0 <= e < size and chain.labels[e] else str(e)

    seen: Dict[str, int] = {}
    for e, label in enumerate(chain.labels):
        if not label:
            report.append(Violation("label", f"state {e} has an empty label", e))
        elif label in seen:
            report.append(Violation("label", f"label '{label}' used by states {seen[label]} and {e}", e))
        else:
            seen[label] = e

    if len(chain.rows) != size:
        report.append(Violation("shape", f"{len(chain.rows)} rows for {size} states"))

    for e, row in enumerate(chain.rows):
        total = zero(chain.mode)
        for destination, value in row:
            if not 0 <= destination < size:
                report.append(Violation("range", f"row {name(e)} points to unknown state {destination}", e))
                continue
            if exact and not isinstance(value, Fraction):
                report.append(Violation("mode", f"row {name(e)} entry at {name(destination)} is not exact", e))
            if not exact and not isinstance(value, float):
                report.append(Violation("mode", f"row {name(e)} entry at {name(destination)} is not a float", e))
            if value == 0:
                report.append(Violation("sparsity", f"row {name(e)} stores a zero at {name(destination)}", e))
            slack = 0 if exact else tolerance
            if value < -slack:
                report.append(Violation(
                    "negative",
                    f"row {name(e)} has negative entry {format_numeric(value, chain.mode)} at {name(destination)}",
                    e
                ))
            elif value > 1 + slack:
                report.append(Violation(
                    "bound",
                    f"row {name(e)} has entry {format_numeric(value, chain.mode)} > 1 at {name(destination)}",
                    e
                ))
            total += value
        off = total != 1 if exact else abs(total - 1) > tolerance
        if off:
            report.append(Violation("stochastic", f"row {name(e)} sums to {format_numeric(total, chain.mode)} ≠ 1", e))

    if not targets.classes:
        report.append(Violation("targets", "no target classes given"))
    owner: Dict[int, str] = {}
    class_names = set()
    for target in targets.classes:
        if not target.name:
            report.append(Violation("targets", "target class with an empty name"))
        elif target.name in class_names:
            report.append(Violation("targets", f"target class name {target.name} used twice"))
        class_names.add(target.name)
        if not target.states:
            report.append(Violation("targets", f"target class {target.name} is empty"))
        for e in sorted(target.states):
            if not 0 <= e < size:
                report.append(Violation("targets", f"target class {target.name} holds unknown state {e}", e))
                continue
            if e in owner:
                report.append(Violation(
                    "disjoint",
                    f"state {name(e)} belongs to target classes {owner[e]} and {target.name}",
                    e
                ))
            else:
                owner[e] = target.name
            if e < len(chain.rows) and any(d not in target.states for d, _ in chain.rows[e]):
                report.append(Violation("closed", f"target class {target.name} not closed at state {name(e)}", e))

    return report


def ensure_valid(chain: ChainSpec, targets: TargetSpec, tolerance: float = ROW_TOLERANCE) -> None:
    """Raise InvalidChainError unless validate_chain reports nothing."""
    report = validate_chain(chain, targets, tolerance)
    if report:
        logger.error(f"Chain failed validation with {len(report)} violation(s): {report[0]}")
        raise InvalidChainError(report)


def block_mass(chain: ChainSpec, e: int, block: Collection[int]) -> Value:
    """Total transition mass from state e into the set `block`."""
    chain.check_state(e)
    members = block if isinstance(block, (set, frozenset)) else set(block)
    for member in members:
        chain.check_state(member)
    total = zero(chain.mode)
    for destination, value in chain.rows[e]:
        if destination in members:
            total += value
    return total


def to_float(chain: ChainSpec) -> ChainSpec:
    """The same chain in float mode."""
    return ChainSpec(
        labels=chain.labels,
        rows=tuple(tuple((d, float(v)) for d, v in row) for row in chain.rows),
        mode=NumericMode.FLOAT
    )


def permute_chain(chain: ChainSpec, targets: TargetSpec, perm: Sequence[int]) -> Tuple[ChainSpec, TargetSpec]:
    """Relabel states so that state e becomes state perm[e]."""
    if sorted(perm) != list(range(chain.size)):
        raise InputError("perm is not a permutation of the state ids")
    labels: List[str] = [""] * chain.size
    rows: List[Dict[int, Value]] = [{} for _ in range(chain.size)]
    for e in range(chain.size):
        labels[perm[e]] = chain.labels[e]
        rows[perm[e]] = {perm[d]: v for d, v in chain.rows[e]}
    permuted_targets = TargetSpec(classes=tuple(
        TargetClass(name=target.name, states=frozenset(perm[e] for e in target.states))
        for target in targets.classes
    ))
    return ChainSpec.build(labels, rows, chain.mode), permuted_targets
