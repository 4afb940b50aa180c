"""
Reach probabilities the compression must preserve, and independent checks of them.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np

from markov_compress.compression.quotient import build_quotient
from markov_compress.compression.refinement import Partition
from markov_compress.errors import InputError, ReachabilityError
from markov_compress.models.chain import (
    ROW_TOLERANCE,
    ChainSpec,
    NumericMode,
    TargetSpec,
    Value,
    coerce_numeric,
    ensure_valid,
    format_numeric,
    one,
    zero,
)

logger = logging.getLogger(__name__)

# Trial t draws from random stream t // TRIALS_PER_STREAM
TRIALS_PER_STREAM = 256


@dataclass(frozen=True)
class InitialDistribution:
    """Sparse initial law mu over state ids."""
    masses: Tuple[Tuple[int, Value], ...]

    @classmethod
    def point_mass(cls, chain: ChainSpec, e: int) -> "InitialDistribution":
        chain.check_state(e)
        return cls(masses=((e, one(chain.mode)),))

    @classmethod
    def uniform(cls, chain: ChainSpec, states: Optional[List[int]] = None) -> "InitialDistribution":
        support = sorted(set(range(chain.size) if states is None else states))
        if not support:
            raise InputError("uniform distribution over no states")
        for e in support:
            chain.check_state(e)
        share = Fraction(1, len(support)) if chain.mode == NumericMode.EXACT else 1.0 / len(support)
        return cls(masses=tuple((e, share) for e in support))

    @classmethod
    def from_mapping(cls, chain: ChainSpec, masses: Mapping[int, object]) -> "InitialDistribution":
        entries = []
        for e, value in sorted(masses.items()):
            chain.check_state(e)
            value = coerce_numeric(value, chain.mode)
            if value != 0:
                entries.append((e, value))
        return cls(masses=tuple(entries))

    def check(self, chain: ChainSpec, tolerance: float = ROW_TOLERANCE) -> None:
        """Raise InputError unless mu is a probability law on the chain's states."""
        total = zero(chain.mode)
        for e, value in self.masses:
            chain.check_state(e)
            if value < 0:
                raise InputError(f"negative initial mass at state {chain.labels[e]}")
            total += value
        off = total != 1 if chain.mode == NumericMode.EXACT else abs(total - 1) > tolerance
        if off:
            raise InputError(f"initial distribution sums to {format_numeric(total, chain.mode)} ≠ 1")


@dataclass(frozen=True)
class ReachReport:
    """Cumulative reach probabilities, values[i][m] for class i by time m."""
    class_names: Tuple[str, ...]
    values: Tuple[Tuple[Value, ...], ...]

    @property
    def horizon(self) -> int:
        return len(self.values[0]) - 1 if self.values else -1

    def at(self, i: int, m: int) -> Value:
        return self.values[i][m]

    def max_discrepancy(self, other: "ReachReport") -> Value:
        if self.class_names != other.class_names or self.horizon != other.horizon:
            raise InputError("reach reports over different classes or horizons")
        return max(
            (abs(a - b) for mine, theirs in zip(self.values, other.values) for a, b in zip(mine, theirs)),
            default=0
        )


@dataclass(frozen=True)
class PreservationReport:
    """Largest gap between original and quotient reach probabilities."""
    max_discrepancy: Value
    state: Optional[int] = None
    target: Optional[int] = None
    horizon: Optional[int] = None


@dataclass(frozen=True)
class AbsorptionReport:
    """Limiting absorption probabilities, values[e][i] for state e into class i."""
    class_names: Tuple[str, ...]
    values: Tuple[Tuple[Value, ...], ...]


@dataclass(frozen=True)
class SimulationReport:
    """Empirical reach frequencies with their binomial standard errors."""
    reach: ReachReport
    standard_errors: Tuple[Tuple[float, ...], ...]
    trials: int
    seed: int


def reach_by_time(
    chain: ChainSpec,
    targets: TargetSpec,
    mu: InitialDistribution,
    tau: int,
    tolerance: float = ROW_TOLERANCE
) -> ReachReport:
    """Probability of having reached each target class by every time m <= tau.

    Pushes mu forward one step at a time; since targets are closed, the
    mass sitting in T_i at time m is the mass that has reached it by m.
    """
    ensure_valid(chain, targets, tolerance)
    mu.check(chain, tolerance)
    if tau < 0:
        raise InputError(f"horizon {tau} is negative")

    owner = {e: i for i, target in enumerate(targets.classes) for e in target.states}
    distribution: Dict[int, Value] = dict(mu.masses)
    values: List[List[Value]] = [[] for _ in targets.classes]
    for m in range(tau + 1):
        if m > 0:
            pushed: Dict[int, Value] = {}
            for e, mass in distribution.items():
                for destination, p in chain.rows[e]:
                    pushed[destination] = pushed.get(destination, zero(chain.mode)) + mass * p
            distribution = pushed
        totals = [zero(chain.mode) for _ in targets.classes]
        for e, mass in distribution.items():
            if e in owner:
                totals[owner[e]] += mass
        for i, total in enumerate(totals):
            values[i].append(total)
    return ReachReport(class_names=targets.names, values=tuple(tuple(row) for row in values))


def reach_matrix(chain: ChainSpec, targets: TargetSpec, tau: int) -> List[List[List[Value]]]:
    """Reach-by-m probabilities for every start state at once.

    Returns:
        u[i][m][e], the probability of being in T_i at time m from e,
        computed by the backward recursion u_{m+1} = P u_m.
    """
    if tau < 0:
        raise InputError(f"horizon {tau} is negative")
    matrix: List[List[List[Value]]] = []
    for target in targets.classes:
        current = [one(chain.mode) if e in target.states else zero(chain.mode) for e in range(chain.size)]
        series = [current]
        for _ in range(tau):
            current = [
                sum((p * current[d] for d, p in row), zero(chain.mode))
                for row in chain.rows
            ]
            series.append(current)
        matrix.append(series)
    return matrix


def preservation_check(
    chain: ChainSpec,
    targets: TargetSpec,
    partition: Partition,
    tau: int,
    tolerance: float = ROW_TOLERANCE
) -> PreservationReport:
    """Compare reach probabilities of the chain and of its projection.

    For every start state e, class i and horizon m <= tau, the reach
    probability from e is compared with the one from pi(e) in the
    quotient built on the partition's representatives.
    """
    ensure_valid(chain, targets, tolerance)
    quotient = build_quotient(chain, partition, targets, check=False)
    original = reach_matrix(chain, targets, tau)
    projected = reach_matrix(quotient.quotient_chain, quotient.quotient_targets, tau)

    worst = PreservationReport(max_discrepancy=zero(chain.mode))
    for i in range(len(targets)):
        for m in range(tau + 1):
            for e in range(chain.size):
                gap = abs(original[i][m][e] - projected[i][m][quotient.projection[e]])
                if gap > worst.max_discrepancy:
                    worst = PreservationReport(max_discrepancy=gap, state=e, target=i, horizon=m)
    if worst.max_discrepancy:
        logger.warning(
            f"Projection changes reach probabilities by {float(worst.max_discrepancy):.3g} "
            f"(state {chain.labels[worst.state]}, class {targets.names[worst.target]}, m={worst.horizon})"
        )
    return worst


def _trapped_states(chain: ChainSpec, targets: TargetSpec) -> List[int]:
    """Non-target states with no path into any target class."""
    predecessors: List[List[int]] = [[] for _ in range(chain.size)]
    for e, row in enumerate(chain.rows):
        for destination, _ in row:
            predecessors[destination].append(e)
    reached = set(targets.target_states)
    frontier = list(reached)
    while frontier:
        state = frontier.pop()
        for predecessor in predecessors[state]:
            if predecessor not in reached:
                reached.add(predecessor)
                frontier.append(predecessor)
    return [e for e in range(chain.size) if e not in reached]


def _pivot_size(value: Fraction) -> int:
    return value.numerator.bit_length() + value.denominator.bit_length()


def _solve_exact(rows: List[Dict[int, Fraction]], rhs: List[List[Fraction]]) -> List[List[Fraction]]:
    """Solve A x = b over the rationals for several right-hand sides.

    Gaussian elimination on sparse rows, pivoting on the entry with the
    smallest numerator and denominator.
    """
    size = len(rows)
    remaining = list(range(size))
    order: List[Tuple[int, int]] = []
    for column in range(size):
        candidates = [r for r in remaining if rows[r].get(column, 0) != 0]
        if not candidates:
            raise ArithmeticError(f"singular system at column {column}")
        pivot = min(candidates, key=lambda r: (_pivot_size(rows[r][column]), r))
        remaining.remove(pivot)
        order.append((column, pivot))
        pivot_row = rows[pivot]
        pivot_value = pivot_row[column]
        for r in candidates:
            if r == pivot:
                continue
            factor = rows[r][column] / pivot_value
            target_row = rows[r]
            for c, value in pivot_row.items():
                updated = target_row.get(c, 0) - factor * value
                if updated:
                    target_row[c] = updated
                else:
                    target_row.pop(c, None)
            rhs[r] = [b - factor * pb for b, pb in zip(rhs[r], rhs[pivot])]

    solution: List[List[Fraction]] = [[] for _ in range(size)]
    for column, pivot in reversed(order):
        row = rows[pivot]
        values = list(rhs[pivot])
        for c, value in row.items():
            if c != column:
                values = [v - value * s for v, s in zip(values, solution[c])]
        solution[column] = [v / row[column] for v in values]
    return solution


def absorption_limit(
    chain: ChainSpec,
    targets: TargetSpec,
    tolerance: float = ROW_TOLERANCE
) -> AbsorptionReport:
    """Probability of eventual absorption in each target class from every state.

    Solves h_i(e) = sum_e' P(e, e') h_i(e') on non-target states with
    h_i = 1 on T_i and 0 on the other classes.

    Raises:
        ReachabilityError: if some non-target state cannot reach any target
    """
    ensure_valid(chain, targets, tolerance)
    trapped = _trapped_states(chain, targets)
    if trapped:
        labels = [chain.labels[e] for e in trapped]
        logger.error(f"Absorption limit undefined, trapped states: {labels}")
        raise ReachabilityError(labels)

    k = len(targets)
    owner = {e: i for i, target in enumerate(targets.classes) for e in target.states}
    transient = [e for e in range(chain.size) if e not in owner]
    index = {e: j for j, e in enumerate(transient)}

    if chain.mode == NumericMode.EXACT:
        rows: List[Dict[int, Fraction]] = []
        rhs: List[List[Fraction]] = []
        for e in transient:
            row: Dict[int, Fraction] = {index[e]: Fraction(1)}
            b = [Fraction(0)] * k
            for destination, p in chain.rows[e]:
                if destination in owner:
                    b[owner[destination]] += p
                else:
                    j = index[destination]
                    updated = row.get(j, Fraction(0)) - p
                    if updated:
                        row[j] = updated
                    else:
                        row.pop(j, None)
            rows.append(row)
            rhs.append(b)
        solution = _solve_exact(rows, rhs) if transient else []
    else:
        matrix = np.eye(len(transient))
        b = np.zeros((len(transient), k))
        for e in transient:
            for destination, p in chain.rows[e]:
                if destination in owner:
                    b[index[e], owner[destination]] += p
                else:
                    matrix[index[e], index[destination]] -= p
        solution = np.linalg.solve(matrix, b).tolist() if transient else []

    values = []
    for e in range(chain.size):
        if e in owner:
            values.append(tuple(one(chain.mode) if i == owner[e] else zero(chain.mode) for i in range(k)))
        else:
            values.append(tuple(solution[index[e]]))
    return AbsorptionReport(class_names=targets.names, values=tuple(values))


def _cumulative_rows(chain: ChainSpec) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """CSR arrays whose row e cumulates to e + 1, so s + u falls inside row s."""
    indptr = np.zeros(chain.size + 1, dtype=np.int64)
    indices: List[int] = []
    cumulative: List[float] = []
    for e, row in enumerate(chain.rows):
        total = sum(float(p) for _, p in row)
        running = 0.0
        for destination, p in row:
            running += float(p) / total
            indices.append(destination)
            cumulative.append(e + running)
        cumulative[-1] = float(e + 1)
        indptr[e + 1] = len(indices)
    return indptr, np.asarray(indices, dtype=np.int64), np.asarray(cumulative)


def simulate(
    chain: ChainSpec,
    targets: TargetSpec,
    mu: InitialDistribution,
    tau: int,
    trials: int,
    seed: int,
    chunk_size: int = 10000,
    tolerance: float = ROW_TOLERANCE
) -> SimulationReport:
    """Monte Carlo estimate of the reach probabilities.

    Trial t draws from stream t // TRIALS_PER_STREAM, a PCG64 generator
    seeded with that child of SeedSequence(seed). A stream serves its
    trials in trial order: one uniform each for the start, then one each
    per step. The report depends only on (seed, trials); `chunk_size`
    sets how many trials are advanced together, rounded to whole streams.
    """
    ensure_valid(chain, targets, tolerance)
    mu.check(chain, tolerance)
    if trials < 1:
        raise InputError(f"trials must be positive, got {trials}")
    if tau < 0:
        raise InputError(f"horizon {tau} is negative")
    if chunk_size < 1:
        raise InputError(f"chunk size must be positive, got {chunk_size}")

    indptr, indices, cumulative = _cumulative_rows(chain)
    target_of = np.full(chain.size, -1, dtype=np.int64)
    for i, target in enumerate(targets.classes):
        target_of[sorted(target.states)] = i
    start_states = np.asarray([e for e, _ in mu.masses], dtype=np.int64)
    start_cumulative = np.cumsum([float(mass) for _, mass in mu.masses])
    start_cumulative /= start_cumulative[-1]

    k = len(targets)
    counts = np.zeros((k, tau + 1), dtype=np.int64)
    streams = np.random.SeedSequence(seed).spawn(math.ceil(trials / TRIALS_PER_STREAM))
    per_chunk = max(1, chunk_size // TRIALS_PER_STREAM)
    for first in range(0, len(streams), per_chunk):
        group = range(first, min(first + per_chunk, len(streams)))
        generators = [np.random.Generator(np.random.PCG64(streams[s])) for s in group]
        sizes = [min(TRIALS_PER_STREAM, trials - s * TRIALS_PER_STREAM) for s in group]

        def draw() -> np.ndarray:
            return np.concatenate([rng.random(n) for rng, n in zip(generators, sizes)])

        picks = np.searchsorted(start_cumulative, draw(), side="right")
        current = start_states[np.minimum(picks, len(start_states) - 1)]
        for m in range(tau + 1):
            if m > 0:
                positions = np.searchsorted(cumulative, current + draw(), side="right")
                positions = np.clip(positions, indptr[current], indptr[current + 1] - 1)
                current = indices[positions]
            reached = target_of[current]
            counts[:, m] += np.bincount(reached[reached >= 0], minlength=k)[:k]
        logger.debug(f"Simulated streams {first + 1}-{group[-1] + 1} of {len(streams)} ({sum(sizes)} trials)")

    frequencies = counts / trials
    errors = np.sqrt(frequencies * (1 - frequencies) / trials)
    return SimulationReport(
        reach=ReachReport(
            class_names=targets.names,
            values=tuple(tuple(float(v) for v in row) for row in frequencies)
        ),
        standard_errors=tuple(tuple(float(v) for v in row) for row in errors),
        trials=trials,
        seed=seed,
    )
