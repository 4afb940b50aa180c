from fractions import Fraction

import pytest

from markov_compress.compression.quotient import (
    build_quotient,
    lumpability_violation,
    quotient_row,
    verify_lumpability,
)
from markov_compress.compression.refinement import Partition, compress
from markov_compress.errors import InputError, LumpabilityError
from markov_compress.generators import gen_coupon, gen_gamblers_ruin, gen_hypercube
from markov_compress.models.chain import ChainSpec, TargetSpec, to_float, validate_chain

q = Fraction


def test_cube_quotient_matrix(cube):
    chain, targets = cube
    quotient = build_quotient(chain, compress(chain, targets).partition, targets)
    assert quotient.quotient_labels == ("T1", "f1", "f2", "T2")
    assert quotient.quotient_chain.rows == (
        ((0, q(1)),),
        ((0, q(1, 3)), (2, q(2, 3))),
        ((1, q(2, 3)), (3, q(1, 3))),
        ((3, q(1)),),
    )
    assert quotient.projection == (0, 1, 1, 1, 2, 2, 2, 3)
    assert quotient.quotient_targets.target_states == frozenset({0, 3})
    assert validate_chain(quotient.quotient_chain, quotient.quotient_targets) == []


def test_uniform_coupon_quotient_matrix():
    chain, targets = gen_coupon([q(1, 5)] * 5)
    quotient = build_quotient(chain, compress(chain, targets).partition, targets)
    assert quotient.quotient_labels == ("f1", "f2", "f3", "f4", "T")
    expected = tuple(((j, q(j + 1, 5)), (j + 1, q(4 - j, 5))) for j in range(4)) + (((4, q(1)),),)
    assert quotient.quotient_chain.rows == expected


@pytest.mark.parametrize("family", [
    lambda: gen_hypercube(4),
    lambda: gen_coupon(["1/2", "1/4", "1/4"]),
    lambda: gen_gamblers_ruin(4, 4, "1/2", merged=True),
])
def test_rows_do_not_depend_on_representative(family):
    chain, targets = family()
    partition = compress(chain, targets).partition
    for members in partition.blocks():
        rows = {tuple(sorted(quotient_row(chain, partition, e).items())) for e in members}
        assert len(rows) == 1


def test_compressing_a_quotient_changes_nothing(cube):
    chain, targets = cube
    quotient = build_quotient(chain, compress(chain, targets).partition, targets)
    again = compress(quotient.quotient_chain, quotient.quotient_targets)
    assert again.partition == Partition.finest(4)


def test_lumpability_violation_names_the_pair(cube):
    chain, targets = cube
    merged_middle = Partition.from_keys([0, 1, 1, 1, 1, 1, 1, 2])
    violation = lumpability_violation(chain, merged_middle, targets)
    assert violation.kind == "lumpability"
    assert "(1,0,0)" in violation.message and "(1,1,0)" in violation.message
    assert not verify_lumpability(chain, merged_middle, targets)


def test_target_class_must_be_one_block():
    chain, targets = gen_gamblers_ruin(2, 2, "1/2", merged=True)
    violation = lumpability_violation(chain, Partition.finest(5), targets)
    assert violation.kind == "target"
    assert "split over 2 blocks" in violation.message

    mirrored = Partition.from_keys([0, 1, 2, 1, 0])
    assert lumpability_violation(chain, mirrored, targets) is None

    intruder = Partition.from_keys([0, 0, 1, 2, 0])
    violation = lumpability_violation(chain, intruder, targets)
    assert violation.kind == "target"
    assert "shares its block with state -1" in violation.message


def test_build_quotient_rejects_non_lumpable(cube):
    chain, targets = cube
    with pytest.raises(LumpabilityError):
        build_quotient(chain, Partition.from_keys([0, 1, 1, 1, 1, 1, 1, 2]), targets)


def test_build_quotient_rejects_mismatched_partition(cube):
    chain, targets = cube
    with pytest.raises(InputError):
        build_quotient(chain, Partition.finest(5), targets)
    with pytest.raises(InputError):
        build_quotient(chain, Partition(assignment=(1, 0, 0, 0, 0, 0, 0, 2), block_count=3), targets)


def test_block_labels_skip_target_names():
    rows = [{1: q(1, 2), 2: q(1, 2)}, {0: q(1, 2), 2: q(1, 2)}, {2: 1}]
    chain = ChainSpec.build(["a", "b", "c"], rows)
    targets = TargetSpec.build({"f1": [2]})
    quotient = build_quotient(chain, compress(chain, targets).partition, targets)
    assert quotient.quotient_labels == ("f2", "f1")


def test_float_quotient(cube):
    chain, targets = cube
    floating = to_float(chain)
    quotient = build_quotient(floating, compress(floating, targets).partition, targets)
    middle = dict(quotient.quotient_chain.rows[1])
    assert middle[0] == pytest.approx(1 / 3)
    assert middle[2] == pytest.approx(2 / 3)
