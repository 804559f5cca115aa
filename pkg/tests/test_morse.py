import pytest

from neurotactile.analyzer import SegmentClass
from neurotactile.errors import RoutingError
from neurotactile.morse import DEFAULT_MORSE_TABLE, decode_morse

DOT, DASH, CONT = SegmentClass.DOT, SegmentClass.DASH, SegmentClass.CONTINUOUS


def test_five_letter_table():
    assert decode_morse([DASH, DOT]) == "N"
    assert decode_morse([DOT, DOT]) == "I"
    assert decode_morse([DASH, DASH]) == "M"
    assert decode_morse([DASH]) == "T"
    assert decode_morse([DOT]) == "E"


def test_unknown_code_rejected_not_error():
    assert decode_morse([DOT, DOT, DOT]) is None


def test_continuous_routes_away():
    with pytest.raises(RoutingError):
        decode_morse([DASH, CONT])


def test_custom_table():
    assert decode_morse([DOT, DASH], {".-": "A"}) == "A"
    assert decode_morse([DASH, DOT], {".-": "A"}) is None


def test_empty_sequence():
    assert decode_morse([]) is None


def test_default_table_letters():
    assert set(DEFAULT_MORSE_TABLE.values()) == {"N", "I", "M", "T", "E"}
