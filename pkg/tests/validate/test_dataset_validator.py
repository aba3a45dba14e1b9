# tests/validate/test_dataset_validator.py

import pytest

from adaptive_mlc.exception.dataset.dataset_exception import (
    DuplicateLabelError,
    IndexOutOfRangeError,
    MalformedLineError,
    SampleCountMismatchError,
)
from adaptive_mlc.validate.dataset_validator import (
    parse_feature_tokens,
    parse_header,
    parse_label_field,
    validate_sample_count,
)


def test_parse_header_valid():
    assert parse_header("2 3 4") == (2, 3, 4)


@pytest.mark.parametrize("line", ["2 3", "a b c", "2 0 4", "-1 3 4", "1 2 3 4"])
def test_parse_header_invalid(line):
    with pytest.raises(MalformedLineError) as exc_info:
        parse_header(line, path="features.txt")
    assert exc_info.value.line_number == 1


def test_parse_feature_tokens_valid():
    assert parse_feature_tokens(["0:1.5", "2:0.5"], 3, None, 2) == ([0, 2], [1.5, 0.5])


def test_parse_feature_tokens_empty_row():
    assert parse_feature_tokens([], 3, None, 2) == ([], [])


@pytest.mark.parametrize(
    "tokens, error",
    [
        (["5:1.0"], IndexOutOfRangeError),
        (["-1:1.0"], IndexOutOfRangeError),
        (["1"], MalformedLineError),
        (["x:1.0"], MalformedLineError),
        (["0:abc"], MalformedLineError),
        (["0:nan"], MalformedLineError),
        (["2:1.0", "1:1.0"], MalformedLineError),
        (["1:1.0", "1:2.0"], MalformedLineError),
    ],
)
def test_parse_feature_tokens_invalid(tokens, error):
    with pytest.raises(error) as exc_info:
        parse_feature_tokens(tokens, 3, "features.txt", 7)
    assert exc_info.value.line_number == 7
    assert exc_info.value.message.startswith("features.txt:7:")


def test_parse_label_field_sorts_and_allows_empty():
    assert parse_label_field("3,0", 4, None, 1) == [0, 3]
    assert parse_label_field("", 4, None, 1) == []
    assert parse_label_field("  ", 4, None, 1) == []


def test_parse_label_field_duplicate():
    with pytest.raises(DuplicateLabelError) as exc_info:
        parse_label_field("0,0", 4, "labels.txt", 3)
    assert exc_info.value.line_number == 3


@pytest.mark.parametrize("text, error", [("4", IndexOutOfRangeError), ("a", MalformedLineError), ("1,", MalformedLineError)])
def test_parse_label_field_invalid(text, error):
    with pytest.raises(error):
        parse_label_field(text, 4, "labels.txt", 1)


def test_validate_sample_count():
    validate_sample_count(3, 3)
    with pytest.raises(SampleCountMismatchError):
        validate_sample_count(3, 2)
