import numpy as np
import pytest
from hypothesis import given, strategies as st

from neurotactile.errors import DomainError, FramingError, IntegrityError
from neurotactile.wire import (
    FRAMING_BIT_OFFSETS,
    WireUnit,
    from_wire,
    pack,
    to_wire,
    unpack,
    window_size,
)


class TestPack:
    def test_all_zero(self):
        assert pack([0] * 9) == 0

    def test_channel0_at_lsb(self):
        codes = [0] * 9
        codes[0] = 3
        assert pack(codes) == 3

    def test_all_three(self):
        assert pack([3] * 9) == 262143

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            pack([4] + [0] * 8)
        with pytest.raises(DomainError):
            pack([0] * 8)


class TestUnpack:
    def test_zero(self):
        assert unpack(0) == (0,) * 9

    def test_full(self):
        assert unpack(262143) == (3,) * 9

    def test_bit_layout(self):
        assert unpack(0b10) == (2,) + (0,) * 8

    def test_too_large(self):
        with pytest.raises(DomainError):
            unpack(1 << 18)

    @given(st.lists(st.integers(0, 3), min_size=9, max_size=9))
    def test_round_trip(self, codes):
        assert list(unpack(pack(codes))) == codes


def frame_bytes(unit: WireUnit) -> list[int]:
    out = []
    for f in range(3):
        base = f * 10
        byte = 0
        for i in range(8):
            byte |= unit.bits[base + 1 + i] << i
        out.append(byte)
    return out


class TestToWire:
    def test_zero_payload_framing(self):
        unit = to_wire(0)
        assert len(unit.bits) == 32
        for f in range(3):
            assert unit.bits[f * 10] == 0  # start
            assert unit.bits[f * 10 + 9] == 1  # stop
        assert unit.bits[30:] == (1, 1)  # idle
        assert frame_bytes(unit) == [0, 0, 0]

    def test_big_endian_split(self):
        assert frame_bytes(to_wire(0x3FFFF)) == [0x03, 0xFF, 0xFF]
        assert frame_bytes(to_wire(1)) == [0x00, 0x00, 0x01]

    def test_data_lsb_first(self):
        unit = to_wire(1)  # low byte 0x01: first data bit of the third frame is 1
        assert unit.bits[21] == 1
        assert all(b == 0 for b in unit.bits[22:29])


class TestFromWire:
    def test_round_trip_edges(self):
        for payload in (0, 1, 0x3FFFF, 0x15555, 0x2AAAA):
            assert from_wire(to_wire(payload)) == payload

    def test_exhaustive_round_trip(self):
        for payload in range(1 << 18):
            assert from_wire(to_wire(payload)) == payload

    def test_stop_bit_flip_rejected(self):
        bits = list(to_wire(0).bits)
        bits[9] = 0
        with pytest.raises(FramingError) as err:
            from_wire(bits)
        assert err.value.bit_offset == 9

    def test_start_bit_flip_rejected(self):
        bits = list(to_wire(12345).bits)
        bits[10] = 1
        with pytest.raises(FramingError) as err:
            from_wire(bits)
        assert err.value.bit_offset == 10

    def test_idle_bit_flip_rejected(self):
        bits = list(to_wire(7).bits)
        bits[31] = 0
        with pytest.raises(FramingError):
            from_wire(bits)

    def test_pad_bits_checked(self):
        bits = list(to_wire(0).bits)
        bits[8] = 1  # highest data bit of the first byte, outside the 18-bit payload
        with pytest.raises(IntegrityError):
            from_wire(bits)

    def test_wrong_length(self):
        with pytest.raises(FramingError):
            from_wire([0] * 31)

    def test_framing_fuzz_no_false_accepts(self):
        rng = np.random.default_rng(99)
        for _ in range(5000):
            payload = int(rng.integers(0, 1 << 18))
            bits = list(to_wire(payload).bits)
            off = int(rng.choice(FRAMING_BIT_OFFSETS))
            bits[off] ^= 1
            with pytest.raises((FramingError, IntegrityError)):
                from_wire(bits)


class TestWindowSize:
    def test_nominal(self):
        assert window_size(400, 2400) == 30

    def test_one_second(self):
        assert window_size(1000, 2400) == 75

    def test_faster_baud(self):
        assert window_size(400, 9600) == 120

    def test_floor(self):
        assert window_size(410, 2400) == 30

    def test_domain(self):
        with pytest.raises(DomainError):
            window_size(0, 2400)
        with pytest.raises(DomainError):
            window_size(400, 0)


class TestHexDump:
    @given(st.integers(0, (1 << 18) - 1))
    def test_hex_round_trip(self, payload):
        unit = to_wire(payload)
        assert WireUnit.from_hex(unit.to_hex()).bits == unit.bits

    def test_unit_validation(self):
        with pytest.raises(DomainError):
            WireUnit(bits=(0,) * 31)
        with pytest.raises(DomainError):
            WireUnit(bits=(0,) * 31 + (2,))
