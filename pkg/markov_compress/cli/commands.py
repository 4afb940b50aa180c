"""
Command-line surface for the chain compressor.
"""

import logging
from contextlib import contextmanager
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple

import click

from markov_compress.cli.documents import parse_chain, serialize_chain
from markov_compress.cli.dot import export_dot
from markov_compress.compression.analysis import (
    InitialDistribution,
    absorption_limit,
    preservation_check,
    reach_by_time,
    simulate,
)
from markov_compress.compression.oracle import brute_force_minimal
from markov_compress.compression.quotient import build_quotient, lumpability_violation
from markov_compress.compression.refinement import CompressionResult, compress, refinement_trace
from markov_compress.config import Settings, get_settings
from markov_compress.errors import ChainError, InputError
from markov_compress.generators import (
    gen_consecutive_wins,
    gen_coupon,
    gen_gamblers_ruin,
    gen_hypercube,
    gen_negative_binomial,
    gen_pair_chain,
    gen_random_chain,
)
from markov_compress.models.chain import ChainSpec, NumericMode, TargetSpec, format_numeric

FAMILIES = ("negbin", "consecutive", "gamblers", "hypercube", "coupon", "pairs", "random")


def _require(value, flag: str, family: str):
    if value is None:
        raise click.UsageError(f"{family} needs {flag}")
    return value


def _split_probs(text: Optional[str]) -> List[str]:
    return [part.strip() for part in text.split(",")] if text else []


def _pair_table(n: int, probs: List[str], collapse: bool) -> Dict[Tuple[int, ...], object]:
    """Transition table for the pair chain from a flat probability list.

    With collapse the list holds q_k (n values) or p_{m,k} (n*n values),
    otherwise p_{h,m,k} (n*n*n values); no list means uniform throws.
    """
    values = range(1, n + 1)
    if not probs:
        share = Fraction(1, n)
        if collapse:
            return {(m, k): share for m in values for k in values}
        return {(h, m, k): share for h in values for m in values for k in values}
    if collapse and len(probs) == n:
        return {(m, k): probs[k - 1] for m in values for k in values}
    if collapse and len(probs) == n * n:
        return {(m, k): probs[(m - 1) * n + k - 1] for m in values for k in values}
    if not collapse and len(probs) == n ** 3:
        return {
            (h, m, k): probs[((h - 1) * n + m - 1) * n + k - 1]
            for h in values for m in values for k in values
        }
    expected = f"{n} or {n * n}" if collapse else str(n ** 3)
    raise click.UsageError(f"pairs with n={n} needs {expected} probabilities, got {len(probs)}")


class CompressorCLI:
    """Commands of the chain compressor."""

    def __init__(
        self,
        settings: Optional[Settings] = None,
        group: Optional[click.Group] = None
    ):
        """Initialize the command group.

        Args:
            settings: Optional settings, loaded from the environment if omitted
            group: Optional click group to register the commands on
        """
        self.logger = logging.getLogger(__name__)
        self.settings = settings or get_settings()
        self.group = group or click.Group(
            name="markov-compress",
            help="Compress absorbing Markov chains while preserving target reach probabilities."
        )
        self._setup_commands()

    def get_group(self) -> click.Group:
        """Get the click group."""
        return self.group

    @contextmanager
    def _handle_errors(self) -> Iterator[None]:
        """Turn library errors into a one-line diagnostic and their exit code."""
        try:
            yield
        except ChainError as e:
            self.logger.debug(f"Command failed: {type(e).__name__}: {e.detail}")
            click.echo(f"error: {e.detail}", err=True)
            raise click.exceptions.Exit(e.exit_code)

    def _load(self, source) -> Tuple[ChainSpec, TargetSpec]:
        return parse_chain(source.read(), self.settings.row_tolerance)

    def _initial(self, chain: ChainSpec, label: Optional[str]) -> InitialDistribution:
        if label is None:
            return InitialDistribution.uniform(chain)
        return InitialDistribution.point_mass(chain, chain.index_of(label))

    def _setup_commands(self) -> None:
        """Setup commands."""
        settings = self.settings
        input_option = click.option(
            "-i", "--input", "source", type=click.File("r"), default="-", show_default=True,
            help="Chain document to read"
        )

        @self.group.command("gen")
        @click.argument("family", type=click.Choice(FAMILIES))
        @click.option("--n", type=int, help="Size parameter (negbin, consecutive, pairs)")
        @click.option("--p", "p", type=str, help="Win probability, as a/b or a decimal")
        @click.option("--n1", type=int, help="Gambler's losses to ruin")
        @click.option("--n2", type=int, help="Gambler's gains to win")
        @click.option("--d", "d", type=int, help="Cube dimension")
        @click.option("--probs", type=str, help="Comma separated probabilities (coupon, pairs)")
        @click.option("--merged", is_flag=True, help="Join the two target classes")
        @click.option("--collapse", is_flag=True, help="Pair transitions depend on the last throw only")
        @click.option("--split-targets", is_flag=True, help="One target class per repeated value")
        @click.option("--states", type=int, default=8, show_default=True, help="Random chain size")
        @click.option("--targets", "n_targets", type=int, default=1, show_default=True,
                      help="Random chain target classes")
        @click.option("--seed", type=int, default=0, show_default=True, help="Random chain seed")
        @click.option("--planted", is_flag=True, help="Plant a lumpable structure in the random chain")
        @click.option("-o", "--output", type=click.File("w"), default="-", help="Where to write the document")
        def gen(family, n, p, n1, n2, d, probs, merged, collapse, split_targets,
                states, n_targets, seed, planted, output):
            """Generate a chain document for one of the example families."""
            with self._handle_errors():
                if family == "negbin":
                    chain, targets = gen_negative_binomial(_require(n, "--n", family), p or "1/2")
                elif family == "consecutive":
                    chain, targets = gen_consecutive_wins(_require(n, "--n", family), p or "1/2")
                elif family == "gamblers":
                    chain, targets = gen_gamblers_ruin(
                        _require(n1, "--n1", family), _require(n2, "--n2", family), p or "1/2", merged
                    )
                elif family == "hypercube":
                    chain, targets = gen_hypercube(_require(d, "--d", family), merged)
                elif family == "coupon":
                    chain, targets = gen_coupon(_split_probs(_require(probs, "--probs", family)))
                elif family == "pairs":
                    size = _require(n, "--n", family)
                    if size < 1:
                        raise InputError(f"n={size} must be an integer >= 1")
                    table = _pair_table(size, _split_probs(probs), collapse)
                    chain, targets = gen_pair_chain(size, table, collapse, split_targets)
                else:
                    chain, targets = gen_random_chain(states, n_targets, seed, planted)
                self.logger.info(f"Generated {family} chain with {chain.size} states")
                output.write(serialize_chain(chain, targets))

        @self.group.command("compress")
        @input_option
        @click.option("--epsilon", type=float, default=None, help="Float-mode mass tolerance")
        @click.option("-o", "--output", type=str, default=None, help="Write the quotient document here ('-' for stdout)")
        @click.option("--dot", "dot_path", type=click.Path(dir_okay=False, writable=True),
                      help="Write the chain colored by block as DOT")
        @click.option("--trace", is_flag=True, help="Print block counts per refinement step")
        def compress_command(source, epsilon, output, dot_path, trace):
            """Compute the minimal quotient and print its block table."""
            with self._handle_errors():
                chain, targets = self._load(source)
                eps = settings.epsilon if epsilon is None else epsilon
                partition_trace = refinement_trace(chain, targets, eps, settings.row_tolerance)
                result = CompressionResult(partition=partition_trace[-1], steps=len(partition_trace) - 1)
                self.logger.info(f"Compressed {chain.size} states to {result.partition.block_count} blocks")
                quotient = build_quotient(chain, result.partition, targets, eps)
                to_stderr = output == "-"

                click.echo(f"complexity: {result.partition.block_count}", err=to_stderr)
                click.echo(f"iterations: {result.steps}", err=to_stderr)
                if trace:
                    counts = " ".join(str(step.block_count) for step in partition_trace)
                    click.echo(f"trace: {counts}", err=to_stderr)
                click.echo("blocks:", err=to_stderr)
                for name, members in zip(quotient.quotient_labels, result.partition.blocks()):
                    click.echo(f"  {name}: {' '.join(chain.labels[e] for e in members)}", err=to_stderr)

                if output is not None:
                    with click.open_file(output, "w") as handle:
                        handle.write(serialize_chain(quotient.quotient_chain, quotient.quotient_targets))
                if dot_path:
                    with click.open_file(dot_path, "w") as handle:
                        handle.write(export_dot(chain, targets, result.partition))

        @self.group.command("complexity")
        @input_option
        @click.option("--epsilon", type=float, default=None, help="Float-mode mass tolerance")
        def complexity(source, epsilon):
            """Print the number of blocks of the minimal quotient."""
            with self._handle_errors():
                chain, targets = self._load(source)
                eps = settings.epsilon if epsilon is None else epsilon
                result = compress(chain, targets, eps, settings.row_tolerance)
                click.echo(str(result.partition.block_count))

        @self.group.command("analyze")
        @input_option
        @click.option("--tau", type=click.IntRange(min=0), required=True, help="Horizon")
        @click.option("--init", "init_label", type=str, help="Start in this state")
        @click.option("--uniform", is_flag=True, help="Start uniformly over all states (default)")
        @click.option("--absorption", is_flag=True, help="Also print limiting absorption probabilities")
        def analyze(source, tau, init_label, uniform, absorption):
            """Print reach-by-time probabilities of every target class."""
            with self._handle_errors():
                if init_label is not None and uniform:
                    raise click.UsageError("--init and --uniform are mutually exclusive")
                chain, targets = self._load(source)
                mu = self._initial(chain, init_label)
                report = reach_by_time(chain, targets, mu, tau, settings.row_tolerance)
                click.echo("\t".join(("m",) + report.class_names))
                for m in range(tau + 1):
                    cells = [format_numeric(report.at(i, m), chain.mode) for i in range(len(targets))]
                    click.echo("\t".join([str(m)] + cells))
                if absorption:
                    limit = absorption_limit(chain, targets, settings.row_tolerance)
                    click.echo("")
                    click.echo("\t".join(("state",) + limit.class_names))
                    for e, row in enumerate(limit.values):
                        click.echo("\t".join([chain.labels[e]] + [format_numeric(v, chain.mode) for v in row]))

        @self.group.command("verify")
        @input_option
        @click.option("--oracle", is_flag=True, help="Also compare with exhaustive search on small chains")
        @click.option("--epsilon", type=float, default=None, help="Float-mode mass tolerance")
        def verify(source, oracle, epsilon):
            """Check that the compressed partition is lumpable and preserves reach probabilities."""
            with self._handle_errors():
                chain, targets = self._load(source)
                eps = settings.epsilon if epsilon is None else epsilon
                tau = settings.verify_tau
                result = compress(chain, targets, eps, settings.row_tolerance)
                passed = True
                click.echo(f"complexity: {result.partition.block_count}")

                violation = lumpability_violation(chain, result.partition, targets, eps)
                click.echo("lumpable: yes" if violation is None else f"lumpable: no ({violation})")
                passed &= violation is None

                preservation = preservation_check(chain, targets, result.partition, tau, settings.row_tolerance)
                gap = preservation.max_discrepancy
                allowed = 0 if chain.mode == NumericMode.EXACT else eps * max(tau, 1)
                click.echo(f"preservation (tau={tau}): max discrepancy {format_numeric(gap, chain.mode)}")
                passed &= gap <= allowed

                if oracle:
                    if chain.size > settings.oracle_max_states:
                        click.echo(f"oracle: skipped ({chain.size} states > {settings.oracle_max_states})")
                    else:
                        minimal = brute_force_minimal(
                            chain, targets, eps, settings.oracle_max_states, settings.row_tolerance
                        )
                        agrees = minimal == result.partition
                        click.echo("oracle: agrees" if agrees else f"oracle: differs ({minimal.block_count} blocks)")
                        passed &= agrees

                if not passed:
                    self.logger.error("Verification failed")
                    click.echo("verify: FAILED", err=True)
                    raise click.exceptions.Exit(1)
                click.echo("verify: ok")

        @self.group.command("simulate")
        @input_option
        @click.option("--tau", type=click.IntRange(min=0), required=True, help="Horizon")
        @click.option("--trials", type=click.IntRange(min=1), required=True, help="Number of trajectories")
        @click.option("--seed", type=int, required=True, help="Seed of the random stream")
        @click.option("--init", "init_label", type=str, help="Start in this state (default uniform)")
        def simulate_command(source, tau, trials, seed, init_label):
            """Estimate reach-by-time probabilities by Monte Carlo."""
            with self._handle_errors():
                chain, targets = self._load(source)
                mu = self._initial(chain, init_label)
                report = simulate(
                    chain, targets, mu, tau, trials, seed,
                    settings.simulation_chunk_size, settings.row_tolerance
                )
                names = report.reach.class_names
                click.echo("\t".join(["m"] + [f"{name}\t{name}_se" for name in names]))
                for m in range(tau + 1):
                    cells = [
                        f"{report.reach.at(i, m):.6f}\t{report.standard_errors[i][m]:.6f}"
                        for i in range(len(names))
                    ]
                    click.echo("\t".join([str(m)] + cells))
                click.echo(f"trials: {trials}  seed: {seed}")
