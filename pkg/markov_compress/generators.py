"""
Generators for the classical absorbing chains and for random test chains.
"""

import logging
from fractions import Fraction
from itertools import product
from typing import Dict, List, Mapping, Sequence, Tuple, Union

import numpy as np

from markov_compress.compression.analysis import InitialDistribution
from markov_compress.errors import InputError
from markov_compress.models.chain import (
    ROW_TOLERANCE,
    ChainSpec,
    NumericMode,
    TargetSpec,
    Value,
    coerce_numeric,
    infer_mode,
    one,
)

logger = logging.getLogger(__name__)

Parameter = Union[Fraction, float, int, str]

MAX_CUBE_DIMENSION = 20
MAX_COUPON_OBJECTS = 16


def _probability(p: Parameter, name: str = "p") -> Tuple[Value, NumericMode]:
    """Coerce an open-interval probability, keeping exact inputs exact."""
    try:
        mode = infer_mode([p])
        value = coerce_numeric(p, mode)
    except (TypeError, ValueError, ZeroDivisionError):
        raise InputError(f"{name}={p!r} is not a number")
    if not 0 < value < 1:
        raise InputError(f"{name}={p!r} must lie strictly between 0 and 1")
    return value, mode


def _count(n: int, name: str, minimum: int = 1) -> int:
    if isinstance(n, bool) or not isinstance(n, int) or n < minimum:
        raise InputError(f"{name}={n!r} must be an integer >= {minimum}")
    return n


def gen_negative_binomial(n: int, p: Parameter) -> Tuple[ChainSpec, TargetSpec]:
    """Play until n wins: level i stays with 1-p and climbs with p."""
    n = _count(n, "n")
    p, mode = _probability(p)
    rows: List[Dict[int, Value]] = [{i: 1 - p, i + 1: p} for i in range(n)]
    rows.append({n: one(mode)})
    return ChainSpec.build([str(i) for i in range(n + 1)], rows, mode), TargetSpec.build({"T": [n]})


def gen_consecutive_wins(n: int, p: Parameter) -> Tuple[ChainSpec, TargetSpec]:
    """Play until n consecutive wins: a loss sends every level back to 0."""
    n = _count(n, "n")
    p, mode = _probability(p)
    rows: List[Dict[int, Value]] = [{0: 1 - p, i + 1: p} for i in range(n)]
    rows.append({n: one(mode)})
    return ChainSpec.build([str(i) for i in range(n + 1)], rows, mode), TargetSpec.build({"T": [n]})


def gen_gamblers_ruin(n1: int, n2: int, p: Parameter, merged: bool = False) -> Tuple[ChainSpec, TargetSpec]:
    """Fortune walk on -n1..n2 moving up with p; T1 = {n2}, T2 = {-n1}."""
    n1 = _count(n1, "n1")
    n2 = _count(n2, "n2")
    p, mode = _probability(p)
    levels = list(range(-n1, n2 + 1))
    labels = [f"{level:+d}" if level else "0" for level in levels]
    rows: List[Dict[int, Value]] = []
    for index, level in enumerate(levels):
        if level in (-n1, n2):
            rows.append({index: one(mode)})
        else:
            rows.append({index + 1: p, index - 1: 1 - p})
    top, bottom = len(levels) - 1, 0
    if merged:
        targets = TargetSpec.build({"T": [bottom, top]})
    else:
        targets = TargetSpec.build([("T1", [top]), ("T2", [bottom])])
    return ChainSpec.build(labels, rows, mode), targets


def gen_hypercube(d: int, merged: bool = False) -> Tuple[ChainSpec, TargetSpec]:
    """Symmetric walk on the vertices of the d-cube, stopped at both poles.

    Vertices are ordered by weight, then by descending coordinates, which
    for d=3 is (0,0,0), (1,0,0), (0,1,0), (0,0,1), (1,1,0), ...
    """
    d = _count(d, "d")
    if d > MAX_CUBE_DIMENSION:
        raise InputError(f"d={d} exceeds {MAX_CUBE_DIMENSION}")
    vertices = sorted(product((0, 1), repeat=d), key=lambda v: (sum(v), tuple(-x for x in v)))
    index = {vertex: i for i, vertex in enumerate(vertices)}
    origin, far = 0, len(vertices) - 1
    step = Fraction(1, d)
    rows: List[Dict[int, Value]] = []
    for i, vertex in enumerate(vertices):
        if i in (origin, far):
            rows.append({i: Fraction(1)})
            continue
        rows.append({
            index[vertex[:axis] + (1 - vertex[axis],) + vertex[axis + 1:]]: step
            for axis in range(d)
        })
    labels = ["(" + ",".join(str(x) for x in vertex) + ")" for vertex in vertices]
    if merged:
        targets = TargetSpec.build({"T": [origin, far]})
    else:
        targets = TargetSpec.build([("T1", [origin]), ("T2", [far])])
    return ChainSpec.build(labels, rows, NumericMode.EXACT), targets


def _coupon_probabilities(probs: Sequence[Parameter]) -> Tuple[List[Value], NumericMode]:
    n = len(probs)
    if not 2 <= n <= MAX_COUPON_OBJECTS:
        raise InputError(f"coupon collector needs 2..{MAX_COUPON_OBJECTS} objects, got {n}")
    try:
        mode = infer_mode(probs)
        values = [coerce_numeric(p, mode) for p in probs]
    except (TypeError, ValueError, ZeroDivisionError):
        raise InputError(f"probabilities {list(probs)!r} are not numbers")
    if any(v <= 0 for v in values):
        raise InputError("coupon probabilities must be positive")
    total = sum(values)
    off = total != 1 if mode == NumericMode.EXACT else abs(total - 1) > ROW_TOLERANCE
    if off:
        raise InputError(f"coupon probabilities sum to {total}, not 1")
    return values, mode


def gen_coupon(probs: Sequence[Parameter]) -> Tuple[ChainSpec, TargetSpec]:
    """Coupon collector on the lattice of collected subsets.

    States are the nonempty proper subsets ordered by size then bitmask,
    followed by the full set T. From S the chain stays with the mass of S
    and adds object k with probability p_k.
    """
    values, mode = _coupon_probabilities(probs)
    n = len(values)
    full = (1 << n) - 1
    masks = sorted(range(1, full), key=lambda mask: (bin(mask).count("1"), mask))
    index = {mask: i for i, mask in enumerate(masks)}
    index[full] = len(masks)

    rows: List[Dict[int, Value]] = []
    for mask in masks:
        row: Dict[int, Value] = {}
        stay = sum((values[k] for k in range(n) if mask >> k & 1), 0 * values[0])
        row[index[mask]] = stay
        for k in range(n):
            if not mask >> k & 1:
                row[index[mask | 1 << k]] = values[k]
        rows.append(row)
    rows.append({index[full]: one(mode)})

    labels = ["{" + ",".join(str(k + 1) for k in range(n) if mask >> k & 1) + "}" for mask in masks]
    labels.append("T")
    return ChainSpec.build(labels, rows, mode), TargetSpec.build({"T": [index[full]]})


def coupon_initial_distribution(probs: Sequence[Parameter]) -> InitialDistribution:
    """First pick: object k, hence the singleton {k}, with probability p_k."""
    values, _ = _coupon_probabilities(probs)
    # singletons come first, ordered by bitmask, so {k} has id k
    return InitialDistribution(masses=tuple(enumerate(values)))


def gen_pair_chain(
    n: int,
    probs: Mapping[Tuple[int, ...], Parameter],
    collapse: bool = False,
    split_targets: bool = False
) -> Tuple[ChainSpec, TargetSpec]:
    """Chain on pairs of consecutive throws, stopped at two identical throws.

    State hm moves to mk with probability probs[(h, m, k)], or
    probs[(m, k)] when `collapse` is set. Throw values run over 1..n. The
    diagonal states hh are absorbing and form the target, one class in all
    or one class per value with `split_targets`.
    """
    n = _count(n, "n")
    try:
        mode = infer_mode(list(probs.values()))
        table = {tuple(key): coerce_numeric(value, mode) for key, value in probs.items()}
    except (TypeError, ValueError, ZeroDivisionError):
        raise InputError("pair chain probabilities are not numbers")

    def state(h: int, m: int) -> int:
        return (h - 1) * n + (m - 1)

    def label(h: int, m: int) -> str:
        return f"{h}{m}" if n < 10 else f"{h}.{m}"

    labels: List[str] = []
    rows: List[Dict[int, Value]] = []
    for h, m in product(range(1, n + 1), repeat=2):
        labels.append(label(h, m))
        if h == m:
            rows.append({state(h, h): one(mode)})
            continue
        row = {}
        for k in range(1, n + 1):
            value = table.get((m, k) if collapse else (h, m, k), 0)
            if value < 0:
                raise InputError(f"negative probability for {label(h, m)} -> {label(m, k)}")
            row[state(m, k)] = value
        total = sum(row.values())
        off = total != 1 if mode == NumericMode.EXACT else abs(total - 1) > ROW_TOLERANCE
        if off:
            raise InputError(f"row {label(h, m)} sums to {total}, not 1")
        rows.append(row)

    diagonal = [(h, state(h, h)) for h in range(1, n + 1)]
    if split_targets:
        targets = TargetSpec.build([(f"T{label(h, h)}", [e]) for h, e in diagonal])
    else:
        targets = TargetSpec.build({"T": [e for _, e in diagonal]})
    return ChainSpec.build(labels, rows, mode), targets


def _split_units(rng: np.random.Generator, units: int, parts: int) -> List[int]:
    """A random composition of `units` into `parts` positive integers."""
    cuts = sorted(int(c) for c in rng.choice(np.arange(1, units), size=parts - 1, replace=False))
    bounds = [0] + cuts + [units]
    return [bounds[i + 1] - bounds[i] for i in range(parts)]


def _random_row(rng: np.random.Generator, candidates: Sequence[int], max_denominator: int) -> Dict[int, Fraction]:
    support = int(rng.integers(1, min(len(candidates), 4) + 1))
    destinations = [int(x) for x in rng.choice(np.asarray(candidates), size=support, replace=False)]
    denominator = int(rng.integers(max(support, 2), max_denominator + 1))
    return {
        destination: Fraction(units, denominator)
        for destination, units in zip(destinations, _split_units(rng, denominator, support))
    }


def _random_base(
    rng: np.random.Generator,
    n_states: int,
    n_targets: int,
    max_denominator: int
) -> Tuple[List[Dict[int, Fraction]], List[List[int]]]:
    order = [int(x) for x in rng.permutation(n_states)]
    classes: List[List[int]] = []
    spare = n_states - n_targets - 1
    cursor = 0
    for _ in range(n_targets):
        size = 2 if spare > 0 and rng.random() < 0.3 else 1
        spare -= size - 1
        classes.append(sorted(order[cursor:cursor + size]))
        cursor += size

    rows: List[Dict[int, Fraction]] = [{} for _ in range(n_states)]
    owner = {e: members for members in classes for e in members}
    for e in range(n_states):
        candidates = owner.get(e, list(range(n_states)))
        rows[e] = _random_row(rng, candidates, max_denominator)
    return rows, classes


def gen_random_chain(
    n_states: int,
    n_targets: int = 1,
    seed: int = 0,
    planted: bool = False,
    max_denominator: int = 64
) -> Tuple[ChainSpec, TargetSpec]:
    """Random exact chain with closed target classes.

    Rows use at most four destinations and denominators up to
    `max_denominator`. With `planted`, a smaller random chain is drawn first
    and every one of its states is copied; each copy spreads the mass of a
    transition over the copies of its destination, so grouping copies gives
    a lumpable partition.
    """
    n_targets = _count(n_targets, "n_targets")
    n_states = _count(n_states, "n_states", n_targets + 1)
    rng = np.random.default_rng(seed)
    labels = [f"s{e}" for e in range(n_states)]

    base_size = max(n_targets + 1, n_states // 2) if planted else n_states
    base_rows, base_classes = _random_base(rng, base_size, n_targets, max_denominator)
    if not planted or base_size == n_states:
        targets = TargetSpec.build([(f"T{i + 1}", members) for i, members in enumerate(base_classes)])
        return ChainSpec.build(labels, base_rows, NumericMode.EXACT), targets

    # every base state keeps one copy, the rest are spread at random
    origin = list(range(base_size)) + [int(x) for x in rng.integers(0, base_size, n_states - base_size)]
    placement = [int(x) for x in rng.permutation(n_states)]
    copies: Dict[int, List[int]] = {}
    for slot, base in enumerate(origin):
        copies.setdefault(base, []).append(placement[slot])

    rows: List[Dict[int, Fraction]] = [{} for _ in range(n_states)]
    for slot, base in enumerate(origin):
        row: Dict[int, Fraction] = {}
        for destination, mass in base_rows[base].items():
            # hand out the mass in units of 1/denominator over the destination's copies
            receivers = copies[destination]
            for _ in range(mass.numerator):
                pick = receivers[int(rng.integers(0, len(receivers)))]
                row[pick] = row.get(pick, Fraction(0)) + Fraction(1, mass.denominator)
        rows[placement[slot]] = row

    targets = TargetSpec.build([
        (f"T{i + 1}", sorted(e for base in members for e in copies[base]))
        for i, members in enumerate(base_classes)
    ])
    logger.debug(f"Planted {base_size} base states into {n_states} states (seed {seed})")
    return ChainSpec.build(labels, rows, NumericMode.EXACT), targets
