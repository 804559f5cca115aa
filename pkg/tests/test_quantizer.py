import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from neurotactile.errors import ConfigurationError, ContractError, IntegrityError
from neurotactile.quantizer import (
    CodeFrame,
    ThresholdBank,
    code_from_bits,
    comparator_bits,
    quantize,
)

BANK = ThresholdBank()

MONOTONE = [(False, False, False), (True, False, False), (True, True, False), (True, True, True)]
NON_MONOTONE = [t for t in itertools.product([False, True], repeat=3) if t not in MONOTONE]


class TestComparatorBits:
    def test_below_all(self):
        assert comparator_bits(0.0, BANK) == (False, False, False)

    def test_between_second_and_third(self):
        x = (BANK.thresholds_v[1] + BANK.thresholds_v[2]) / 2
        assert comparator_bits(x, BANK) == (True, True, False)

    def test_above_all(self):
        assert comparator_bits(10.0, BANK) == (True, True, True)

    def test_threshold_inclusive(self):
        assert comparator_bits(BANK.thresholds_v[0], BANK) == (True, False, False)


class TestCodeFromBits:
    def test_quoted_formula_table(self):
        # bit0 = (V1 XOR V2) OR V3, bit1 = V2 OR V3, code = 2*bit1 + bit0
        assert code_from_bits(False, False, False) == 0
        assert code_from_bits(True, False, False) == 1
        assert code_from_bits(True, True, False) == 2
        assert code_from_bits(True, True, True) == 3

    def test_exhaustive_equals_highest_threshold_index(self):
        for triple in MONOTONE:
            expected = sum(triple)  # independent reading: count of crossed thresholds
            formula = (2 * int(triple[1] or triple[2])
                       + int((triple[0] != triple[1]) or triple[2]))
            assert code_from_bits(*triple) == expected == formula

    def test_rejects_all_non_monotone(self):
        assert len(NON_MONOTONE) == 4
        for triple in NON_MONOTONE:
            with pytest.raises(IntegrityError):
                code_from_bits(*triple)


class TestQuantize:
    def test_resting_all_zero(self):
        currents = np.full(9, 1e-9)  # k_iv * 1e-9 = 5e-4 V, below every threshold
        frame = quantize(currents, BANK)
        assert frame.codes == (0,) * 9

    def test_single_channel_band(self):
        currents = np.full(9, 1e-9)
        x_target = (BANK.thresholds_v[0] + BANK.thresholds_v[1]) / 2
        currents[3] = x_target / BANK.k_iv_v_per_a
        frame = quantize(currents, BANK)
        assert frame.codes[3] == 1
        assert all(c == 0 for i, c in enumerate(frame.codes) if i != 3)

    def test_saturated(self):
        currents = np.full(9, 1e-5)  # 5 V after conversion
        assert quantize(currents, BANK).codes == (3,) * 9

    def test_wrong_channel_count(self):
        with pytest.raises(ContractError):
            quantize(np.zeros(4), BANK)

    @given(st.floats(0, 6), st.floats(0, 6))
    def test_monotone_in_current(self, x, y):
        cx = quantize(np.full(9, x / BANK.k_iv_v_per_a), BANK).codes[0]
        cy = quantize(np.full(9, y / BANK.k_iv_v_per_a), BANK).codes[0]
        if x <= y:
            assert cx <= cy


class TestTypes:
    def test_threshold_ordering_enforced(self):
        with pytest.raises(ConfigurationError):
            ThresholdBank(thresholds_v=(2.0, 1.0, 3.0))
        with pytest.raises(ConfigurationError):
            ThresholdBank(thresholds_v=(0.0, 1.0, 2.0))

    def test_code_frame_validation(self):
        with pytest.raises(ContractError):
            CodeFrame(0.0, (0,) * 8)
        with pytest.raises(ContractError):
            CodeFrame(0.0, (0,) * 8 + (4,))
