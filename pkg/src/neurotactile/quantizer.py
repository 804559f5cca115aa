"""Multi-threshold quantization: I/V conversion, three comparators, logic code.

Each channel's drain current becomes a voltage through the transimpedance
gain, three comparators compare it against ordered thresholds, and the two
logic-gate outputs, bit0 = (V1 XOR V2) OR V3 and bit1 = V2 OR V3, concatenate
into a 2-bit code equal to the index of the highest threshold crossed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

import numpy as np

from .errors import ConfigurationError, ContractError, IntegrityError

N_CELLS = 9

# Calibration products (see calibrate module): thresholds sit so every pulse
# ripple in the operating band crosses at least one of them, and so the code
# falls back within a couple of samples of each ripple peak.
DEFAULT_THRESHOLDS_V = (1.8, 2.4, 3.0)
DEFAULT_K_IV = 5e5  # makes a fully-on channel (10 uA) read 5 V


@dataclass(frozen=True)
class ThresholdBank:
    k_iv_v_per_a: float = DEFAULT_K_IV
    thresholds_v: tuple[float, float, float] = DEFAULT_THRESHOLDS_V
    sample_period_ms: float = 32000.0 / 2400.0  # one code frame per wire unit

    def __post_init__(self):
        t1, t2, t3 = self.thresholds_v
        if not 0 < t1 < t2 < t3:
            raise ConfigurationError("thresholds must satisfy 0 < t1 < t2 < t3")
        if self.k_iv_v_per_a <= 0:
            raise ConfigurationError("transimpedance gain must be positive")
        if self.sample_period_ms <= 0:
            raise ConfigurationError("sample period must be positive")


def comparator_bits(x_v: float, bank: ThresholdBank | None = None) -> tuple[bool, bool, bool]:
    """Comparator outputs (V1, V2, V3): whether x reaches each threshold."""
    bank = bank or ThresholdBank()
    return tuple(x_v >= t for t in bank.thresholds_v)  # type: ignore[return-value]


def code_from_bits(v1: bool, v2: bool, v3: bool) -> int:
    """2-bit code from comparator outputs via the logic gates.

    A physical comparator bank cannot assert a higher threshold without the
    lower ones; such triples signal corruption and are rejected.
    """
    if (v3 and not v2) or (v2 and not v1):
        raise IntegrityError(f"non-monotone comparator triple {(v1, v2, v3)}")
    bit0 = (v1 != v2) or v3
    bit1 = v2 or v3
    return 2 * int(bit1) + int(bit0)


@dataclass(frozen=True)
class CodeFrame:
    t_ms: float
    codes: tuple[int, ...]

    def __post_init__(self):
        if len(self.codes) != N_CELLS:
            raise ContractError(f"code frame needs {N_CELLS} codes")
        if any(not 0 <= c <= 3 for c in self.codes):
            raise ContractError("codes must be 2-bit values in 0..3")


def quantize(
    currents_a: Sequence[float] | np.ndarray,
    bank: ThresholdBank | None = None,
    t_ms: float = 0.0,
) -> CodeFrame:
    """Quantize 9 drain currents into a CodeFrame."""
    bank = bank or ThresholdBank()
    currents = np.asarray(currents_a, dtype=float)
    if currents.shape != (N_CELLS,):
        raise ContractError(f"expected {N_CELLS} channel currents")
    codes = tuple(
        code_from_bits(*comparator_bits(float(bank.k_iv_v_per_a * i), bank))
        for i in currents
    )
    return CodeFrame(t_ms=t_ms, codes=codes)


def write_code_csv(frames: Iterable[CodeFrame], dest: IO[str]) -> None:
    writer = csv.writer(dest)
    writer.writerow(["t_ms"] + [f"c{i}" for i in range(N_CELLS)])
    for f in frames:
        writer.writerow([f.t_ms, *f.codes])


def read_code_csv(source: IO[str]) -> list[CodeFrame]:
    reader = csv.DictReader(source)
    cols = ["t_ms"] + [f"c{i}" for i in range(N_CELLS)]
    if reader.fieldnames is None or set(cols) - set(reader.fieldnames):
        raise ContractError(f"code CSV must have columns {','.join(cols)}")
    return [
        CodeFrame(t_ms=float(r["t_ms"]), codes=tuple(int(r[f"c{i}"]) for i in range(N_CELLS)))
        for r in reader
    ]
