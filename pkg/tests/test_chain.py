from fractions import Fraction

import pytest
from hypothesis import given, settings as hypothesis_settings
from hypothesis import strategies as st

from markov_compress.errors import InputError, InvalidChainError
from markov_compress.generators import gen_random_chain
from markov_compress.models.chain import (
    ChainSpec,
    NumericMode,
    TargetClass,
    TargetSpec,
    block_mass,
    coerce_numeric,
    ensure_valid,
    infer_mode,
    parse_numeric,
    permute_chain,
    to_float,
    validate_chain,
)


def kinds(report):
    return [violation.kind for violation in report]


def test_build_drops_zeros_and_sums_duplicates():
    chain = ChainSpec.build(["a", "b"], [{0: "1/2", 1: "1/2"}, [0, 1]])
    assert chain.rows == (((0, Fraction(1, 2)), (1, Fraction(1, 2))), ((1, Fraction(1)),))
    assert chain.nnz == 3
    assert chain.row(1) == {1: Fraction(1)}


def test_build_rejects_unknown_destination():
    with pytest.raises(InputError):
        ChainSpec.build(["a"], [{1: 1}])


@pytest.mark.parametrize("text, value, mode", [
    ("2/4", Fraction(1, 2), NumericMode.EXACT),
    ("0.25", 0.25, NumericMode.FLOAT),
    ("1e-3", 0.001, NumericMode.FLOAT),
    ("1", Fraction(1), None),
])
def test_parse_numeric(text, value, mode):
    assert parse_numeric(text) == (value, mode)


@pytest.mark.parametrize("text", ["abc", "1/0", "nan", "inf", ""])
def test_parse_numeric_rejects(text):
    with pytest.raises(ValueError):
        parse_numeric(text)


def test_coerce_numeric():
    assert coerce_numeric(0.3, NumericMode.EXACT) == Fraction(3, 10)
    assert coerce_numeric("1/4", NumericMode.FLOAT) == 0.25
    with pytest.raises(InputError):
        coerce_numeric(True, NumericMode.EXACT)
    assert infer_mode(["1/2", 1]) == NumericMode.EXACT
    assert infer_mode(["1/2", "0.5"]) == NumericMode.FLOAT


def test_valid_chain_has_empty_report(cube):
    chain, targets = cube
    assert validate_chain(chain, targets) == []


def test_row_sum_reported_with_label():
    chain = ChainSpec.build(["a", "b"], [{0: "1/4", 1: "1/4"}, {1: 1}])
    report = validate_chain(chain, TargetSpec.build({"T": [1]}))
    assert kinds(report) == ["stochastic"]
    assert str(report[0]) == "row a sums to 1/2 ≠ 1"


def test_open_target_class_reported():
    chain = ChainSpec.build(["a", "b"], [{1: 1}, {0: 1}])
    report = validate_chain(chain, TargetSpec.build({"T": [0]}))
    assert str(report[0]) == "target class T not closed at state a"


def test_target_problems_reported(absorbing_pair):
    chain, _ = absorbing_pair
    assert kinds(validate_chain(chain, TargetSpec(classes=()))) == ["targets"]
    overlapping = TargetSpec.build([("T1", [1]), ("T2", [1])])
    assert "disjoint" in kinds(validate_chain(chain, overlapping))
    unknown = TargetSpec.build({"T": [5]})
    assert kinds(validate_chain(chain, unknown)) == ["targets"]
    empty = TargetSpec(classes=(TargetClass(name="T", states=frozenset()),))
    assert kinds(validate_chain(chain, empty)) == ["targets"]


def test_labels_must_be_unique_and_nonempty():
    chain = ChainSpec.build(["a", "a", ""], [{0: 1}, {1: 1}, {2: 1}])
    report = validate_chain(chain, TargetSpec.build({"T": [0]}))
    assert kinds(report) == ["label", "label"]


def test_entries_checked_against_mode():
    chain = ChainSpec(labels=("a",), rows=(((0, 1.0),),), mode=NumericMode.EXACT)
    assert "mode" in kinds(validate_chain(chain, TargetSpec.build({"T": [0]})))


def test_negative_entries_reported():
    chain = ChainSpec.build(["a", "b"], [{0: "3/2", 1: "-1/2"}, {1: 1}])
    assert set(kinds(validate_chain(chain, TargetSpec.build({"T": [1]})))) == {"negative", "bound"}


def test_float_rows_within_tolerance():
    targets = TargetSpec.build({"T": [1]})
    close = ChainSpec.build(["a", "b"], [{0: 0.5, 1: 0.5 + 1e-13}, {1: 1.0}], NumericMode.FLOAT)
    assert validate_chain(close, targets) == []
    off = ChainSpec.build(["a", "b"], [{0: 0.5, 1: 0.5 + 1e-10}, {1: 1.0}], NumericMode.FLOAT)
    assert kinds(validate_chain(off, targets)) == ["stochastic"]


def test_ensure_valid_carries_report():
    chain = ChainSpec.build(["a", "b"], [{0: "1/4"}, {0: "1/4"}])
    with pytest.raises(InvalidChainError) as info:
        ensure_valid(chain, TargetSpec.build({"T": [1]}))
    assert len(info.value.report) == 3
    assert info.value.detail.endswith("(+2 more)")
    assert info.value.exit_code == 1


def test_block_mass(cube):
    chain, _ = cube
    assert block_mass(chain, 1, {0}) == Fraction(1, 3)
    assert block_mass(chain, 1, [4, 5, 6]) == Fraction(2, 3)
    assert block_mass(chain, 0, {1, 2, 3}) == 0
    with pytest.raises(InputError):
        block_mass(chain, 8, {0})
    with pytest.raises(InputError):
        block_mass(chain, 0, {9})


def test_target_spec_helpers(cube):
    _, targets = cube
    assert targets.names == ("T1", "T2")
    assert targets.target_states == frozenset({0, 7})
    assert targets.class_of(7) == 1
    assert targets.class_of(3) is None
    assert targets.merged().classes == (TargetClass(name="T", states=frozenset({0, 7})),)
    assert targets.single(1).names == ("T2",)


def test_index_of(cube):
    chain, _ = cube
    assert chain.index_of("(1,1,1)") == 7
    with pytest.raises(InputError, match="unknown label"):
        chain.index_of("(2,0,0)")


def test_to_float(cube):
    chain, targets = cube
    floating = to_float(chain)
    assert floating.mode == NumericMode.FLOAT
    assert floating.rows[1] == ((0, 1 / 3), (4, 1 / 3), (5, 1 / 3))
    assert validate_chain(floating, targets) == []


def test_permute_chain(absorbing_pair):
    chain, targets = absorbing_pair
    permuted, permuted_targets = permute_chain(chain, targets, [1, 0])
    assert permuted.labels == ("b", "a")
    assert permuted.rows == (((0, Fraction(1)),), ((0, Fraction(1, 2)), (1, Fraction(1, 2))))
    assert permuted_targets.target_states == frozenset({0})
    with pytest.raises(InputError):
        permute_chain(chain, targets, [0, 0])


@hypothesis_settings(max_examples=50, deadline=None)
@given(
    n_states=st.integers(min_value=3, max_value=30),
    n_targets=st.integers(min_value=1, max_value=2),
    seed=st.integers(min_value=0, max_value=2 ** 32 - 1),
    planted=st.booleans(),
)
def test_random_chains_are_valid(n_states, n_targets, seed, planted):
    chain, targets = gen_random_chain(n_states, n_targets, seed, planted)
    assert validate_chain(chain, targets) == []
    assert all(len(row) <= 4 for row in chain.rows) or planted
