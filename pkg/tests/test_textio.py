import pytest
from hypothesis import given, strategies as st

from aklab.constructions import frt
from aklab.sets import SetFamily, Subset
from aklab.textio import FamilyFormatError, format_family, parse_family, parse_subset, format_subset


def test_parse_with_empty_set():
    F = parse_family("n 3\n1 2\n.")
    assert F.n == 3 and set(F.masks) == {0b011, 0}


def test_comments_and_blank_lines():
    F = parse_family("# header comment\n\nn 4\n# a set\n1 4\n\n2\n")
    assert F.member_lists() == [(2,), (1, 4)]


def test_round_trip_is_byte_identical():
    text = format_family(frt(4, 2, 1))
    assert format_family(parse_family(text)) == text
    assert text.splitlines()[:3] == ["n 4", "1 2 3", "1 2 4"]


@pytest.mark.parametrize(
    "text,msg",
    [
        ("n 2\n5", "element 5 exceeds n=2 at line 2"),
        ("1 2\n", "expected 'n <int>' header at line 1"),
        ("n 3\n2 1", "not strictly increasing at line 2"),
        ("n 3\n1 x", "malformed element 'x' at line 2"),
        ("n 3\n0", "not positive at line 2"),
        ("", "missing"),
    ],
)
def test_errors_carry_line_numbers(text, msg):
    with pytest.raises(FamilyFormatError, match=msg):
        parse_family(text)


def test_duplicates_collapse():
    assert len(parse_family("n 3\n1\n1\n")) == 1


@given(st.integers(1, 7).flatmap(lambda n: st.tuples(st.just(n), st.lists(st.integers(0, (1 << n) - 1)))))
def test_round_trip_random(arg):
    n, masks = arg
    F = SetFamily(n, masks)
    assert parse_family(format_family(F)) == F


def test_subset_text():
    assert parse_subset("2 4 6", 7) == Subset.of(7, [2, 4, 6])
    assert parse_subset("2,4", 7) == Subset.of(7, [2, 4])
    assert format_subset(parse_subset(".", 3)) == "."
