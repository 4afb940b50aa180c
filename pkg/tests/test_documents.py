import json
from fractions import Fraction

import pytest

from markov_compress.cli.documents import parse_chain, parse_document, serialize_chain
from markov_compress.errors import DocumentError, InvalidChainError
from markov_compress.generators import gen_coupon, gen_hypercube, gen_negative_binomial, gen_random_chain
from markov_compress.models.chain import NumericMode, to_float


def document(**fields):
    base = {
        "states": ["a", "T"],
        "targets": {"T": ["T"]},
        "transitions": [["a", "a", "1/3"], ["a", "T", "2/3"], ["T", "T", "1"]],
    }
    base.update(fields)
    return json.dumps(base)


@pytest.mark.parametrize("family", [
    lambda: gen_hypercube(3),
    lambda: gen_coupon(["1/2", "1/4", "1/4"]),
    lambda: gen_random_chain(15, 2, seed=9, planted=True),
    lambda: gen_negative_binomial(3, "0.3"),
])
def test_round_trip(family):
    chain, targets = family()
    text = serialize_chain(chain, targets)
    assert parse_chain(text) == (chain, targets)
    assert serialize_chain(*parse_chain(text)) == text


def test_float_round_trip_is_exact(cube):
    chain, targets = cube
    floating = to_float(chain)
    assert parse_chain(serialize_chain(floating, targets)) == (floating, targets)


def test_canonical_text(absorbing_pair):
    text = serialize_chain(*absorbing_pair)
    assert text.endswith("}\n")
    data = json.loads(text)
    assert data == {
        "states": ["a", "b"],
        "targets": {"T": ["b"]},
        "transitions": [["a", "a", "1/2"], ["a", "b", "1/2"], ["b", "b", "1/1"]],
        "mode": "exact",
    }


def test_rationals_are_reduced():
    chain, _ = parse_chain(document(transitions=[["a", "a", "2/6"], ["a", "T", "4/6"], ["T", "T", "1"]]))
    assert chain.mode == NumericMode.EXACT
    assert chain.rows[0] == ((0, Fraction(1, 3)), (1, Fraction(2, 3)))


def test_decimal_document_is_float():
    chain, _ = parse_chain(document(transitions=[["a", "a", "0.25"], ["a", "T", "0.75"], ["T", "T", "1"]]))
    assert chain.mode == NumericMode.FLOAT
    assert chain.rows[0] == ((0, 0.25), (1, 0.75))


def test_unknown_label():
    text = document(transitions=[["a", "b", "1/1"], ["T", "T", "1/1"]])
    with pytest.raises(DocumentError, match="unknown label 'b'") as info:
        parse_chain(text)
    assert info.value.field == "transitions.0"
    assert info.value.exit_code == 2


def test_unknown_target_label():
    with pytest.raises(DocumentError, match="unknown label 'U'"):
        parse_chain(document(targets={"T": ["U"]}))


def test_syntax_error_reports_line():
    with pytest.raises(DocumentError) as info:
        parse_chain('{\n  "states": ["a",\n}')
    assert info.value.line == 3
    assert info.value.detail.startswith("line 3")


@pytest.mark.parametrize("fields, location", [
    ({"states": []}, "states"),
    ({"states": ["a", "a"]}, "states"),
    ({"transitions": [["a", "T", 0.5]]}, "transitions.0.2"),
    ({"transitions": [["a", "T", "half"]]}, "transitions"),
    ({"extra": 1}, "extra"),
])
def test_schema_errors_report_field(fields, location):
    with pytest.raises(DocumentError) as info:
        parse_chain(document(**fields))
    assert info.value.field == location


def test_mixed_styles_rejected():
    text = document(transitions=[["a", "a", "1/2"], ["a", "T", "0.5"], ["T", "T", "1"]])
    with pytest.raises(DocumentError, match="mixes"):
        parse_chain(text)


def test_mode_must_match_style():
    with pytest.raises(DocumentError, match="mode is float"):
        parse_chain(document(mode="float"))


def test_duplicate_transition():
    text = document(transitions=[["a", "T", "1/2"], ["a", "T", "1/2"], ["T", "T", "1"]])
    with pytest.raises(DocumentError, match="duplicate transition"):
        parse_chain(text)


def test_invalid_chain_raises_report():
    text = document(transitions=[["a", "a", "1/3"], ["a", "T", "1/3"], ["T", "T", "1"]])
    with pytest.raises(InvalidChainError, match="row a sums to 2/3"):
        parse_chain(text)


def test_integer_document_defaults_to_exact():
    doc = parse_document(json.dumps({"states": ["T"], "targets": {"T": ["T"]}, "transitions": [["T", "T", "1"]]}))
    assert doc.resolved_mode() == NumericMode.EXACT
