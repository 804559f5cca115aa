"""Bit-exact serial framing of code frames.

Nine 2-bit codes pack into an 18-bit payload (channel 0 at the LSB). On the
wire the payload splits big-endian into 3 bytes, each sent as a standard
asynchronous character frame (start 0, 8 data bits LSB-first, stop 1),
followed by 2 idle bit-times: 32 bit-times per unit. At 2400 baud that is 75
units/s, hence 30 units per 400 ms analysis window. The 6 unused data bits
are zero on encode and checked on decode, turning dead bits into an
integrity check. docs/wire-format.md states the layout bit by bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError, FramingError, IntegrityError

PAYLOAD_BITS = 18
UNIT_BITS = 32
BYTES_PER_UNIT = 3
CHAR_FRAME_BITS = 10
N_CELLS = 9


@dataclass(frozen=True)
class CodecConfig:
    baud: int = 2400
    window_ms: float = 400.0

    def __post_init__(self):
        if self.baud <= 0:
            raise DomainError("baud rate must be positive")
        if self.window_ms <= 0:
            raise DomainError("window must be positive")

    @property
    def unit_period_ms(self) -> float:
        return 1000.0 * UNIT_BITS / self.baud


@dataclass(frozen=True)
class WireUnit:
    bits: tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) != UNIT_BITS or any(b not in (0, 1) for b in self.bits):
            raise DomainError(f"wire unit must be exactly {UNIT_BITS} bits of 0/1")

    def to_hex(self) -> str:
        value = 0
        for b in self.bits:
            value = (value << 1) | b
        return f"{value:08x}"

    @classmethod
    def from_hex(cls, text: str) -> "WireUnit":
        value = int(text.strip(), 16)
        if value >= 1 << UNIT_BITS:
            raise DomainError("hex dump longer than 32 bits")
        return cls(bits=tuple((value >> (UNIT_BITS - 1 - i)) & 1 for i in range(UNIT_BITS)))


def pack(codes: Sequence[int]) -> int:
    """Pack 9 codes into the 18-bit payload; channel c occupies bits 2c+1..2c."""
    if len(codes) != N_CELLS:
        raise DomainError(f"expected {N_CELLS} codes")
    value = 0
    for c, code in enumerate(codes):
        if not 0 <= code <= 3:
            raise DomainError(f"code {code} out of range 0..3")
        value |= code << (2 * c)
    return value


def unpack(payload: int) -> tuple[int, ...]:
    """Inverse of pack: unpack(pack(x)) == x for all code vectors."""
    if not 0 <= payload < 1 << PAYLOAD_BITS:
        raise DomainError(f"payload {payload} does not fit in {PAYLOAD_BITS} bits")
    return tuple((payload >> (2 * c)) & 3 for c in range(N_CELLS))


def _payload_bytes(payload: int) -> tuple[int, int, int]:
    # Big-endian split: byte0 carries the top 2 payload bits zero-padded to 8.
    return (payload >> 16) & 0xFF, (payload >> 8) & 0xFF, payload & 0xFF


def to_wire(payload: int) -> WireUnit:
    """Frame a payload as 3 character frames plus 2 idle bits (32 bit-times)."""
    if not 0 <= payload < 1 << PAYLOAD_BITS:
        raise DomainError(f"payload {payload} does not fit in {PAYLOAD_BITS} bits")
    bits: list[int] = []
    for byte in _payload_bytes(payload):
        bits.append(0)  # start
        bits.extend((byte >> i) & 1 for i in range(8))  # data, LSB first
        bits.append(1)  # stop
    bits.extend((1, 1))  # idle gap between units
    return WireUnit(bits=tuple(bits))


def from_wire(unit: WireUnit | Sequence[int]) -> int:
    """Parse a 32-bit-time unit back to its payload.

    Raises FramingError (with the offending bit offset) on any start/stop/idle
    violation and IntegrityError if the 6 pad bits are nonzero.
    """
    bits = unit.bits if isinstance(unit, WireUnit) else tuple(unit)
    if len(bits) != UNIT_BITS:
        raise FramingError(f"unit must be {UNIT_BITS} bit-times, got {len(bits)}", 0)
    data: list[int] = []
    for f in range(BYTES_PER_UNIT):
        base = f * CHAR_FRAME_BITS
        if bits[base] != 0:
            raise FramingError("start bit must be 0", base)
        if bits[base + 9] != 1:
            raise FramingError("stop bit must be 1", base + 9)
        byte = 0
        for i in range(8):
            byte |= bits[base + 1 + i] << i
        data.append(byte)
    for off in (30, 31):
        if bits[off] != 1:
            raise FramingError("idle bit must be 1", off)
    if data[0] >= 1 << (PAYLOAD_BITS - 16):
        raise IntegrityError("pad bits of the first byte must be zero")
    return (data[0] << 16) | (data[1] << 8) | data[2]


FRAMING_BIT_OFFSETS = (0, 9, 10, 19, 20, 29, 30, 31)


def window_size(window_ms: float, baud: int) -> int:
    """Units per analysis window: floor(T*B / (1000*32))."""
    if window_ms <= 0 or baud <= 0:
        raise DomainError("window and baud must be positive")
    return math.floor(window_ms * baud / (1000.0 * UNIT_BITS))
