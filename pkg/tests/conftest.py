"""
Shared fixtures for the test suite.
"""

from fractions import Fraction

import pytest
from click.testing import CliRunner

from markov_compress.cli.commands import CompressorCLI
from markov_compress.config import Settings
from markov_compress.generators import gen_hypercube
from markov_compress.models.chain import ChainSpec, TargetSpec


@pytest.fixture
def settings():
    return Settings(_env_file=None)


@pytest.fixture
def cli(settings):
    return CompressorCLI(settings).get_group()


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def cube():
    return gen_hypercube(3)


@pytest.fixture
def absorbing_pair():
    """State a moves to the target b with probability 1/2."""
    chain = ChainSpec.build(["a", "b"], [{0: Fraction(1, 2), 1: Fraction(1, 2)}, {1: 1}])
    return chain, TargetSpec.build({"T": [1]})


@pytest.fixture
def crossed_targets():
    """Two targets whose separate compressions agree on c ~ d while the joint one does not.

    States c, d, x1, y1, x2, y2, Z, T1, T2 have ids 0..8. Alone, T1 pairs
    x1 with y1 and x2 with y2; T2 pairs x1 with y2 and y1 with x2.
    """
    q = Fraction
    rows = [
        {2: q(1, 2), 4: q(1, 2)},
        {3: q(1, 2), 5: q(1, 2)},
        {7: q(1, 4), 8: q(1, 4), 6: q(1, 2)},
        {7: q(1, 4), 8: q(1, 2), 6: q(1, 4)},
        {7: q(1, 2), 8: q(1, 2)},
        {7: q(1, 2), 8: q(1, 4), 6: q(1, 4)},
        {6: 1},
        {7: 1},
        {8: 1},
    ]
    chain = ChainSpec.build(["c", "d", "x1", "y1", "x2", "y2", "Z", "T1", "T2"], rows)
    return chain, TargetSpec.build([("T1", [7]), ("T2", [8])])
