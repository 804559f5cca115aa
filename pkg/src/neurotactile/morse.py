"""Morse lookup over classified segments."""

from __future__ import annotations

from typing import Mapping, Sequence

from .analyzer import SegmentClass
from .errors import RoutingError

# The five letters the tactile sessions exercise; extend freely.
DEFAULT_MORSE_TABLE: dict[str, str] = {
    "-.": "N",
    "..": "I",
    "--": "M",
    "-": "T",
    ".": "E",
}

_SYMBOLS = {SegmentClass.DOT: ".", SegmentClass.DASH: "-"}


def decode_morse(
    symbols: Sequence[SegmentClass],
    table: Mapping[str, str] | None = None,
) -> str | None:
    """Exact-match lookup of a dot/dash sequence; None when the code is unknown.

    Continuous segments never belong in the Morse path (they carry trend
    information instead) and raise RoutingError.
    """
    if any(s is SegmentClass.CONTINUOUS for s in symbols):
        raise RoutingError("continuous segment routed to the Morse decoder")
    code = "".join(_SYMBOLS[s] for s in symbols)
    return (table or DEFAULT_MORSE_TABLE).get(code)
