"""Operator-symbol datasets: pad masks, featurization, synthetic generation.

Each sample presses a mold shape onto the 3x3 pad and runs the full pipeline;
the feature vector is the per-channel maximum threshold code over the press,
scaled to [0, 1]. Dataset generation is deterministic per seed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import IO, Sequence

import numpy as np

from .analyzer import WindowReport
from .errors import DomainError, FormatError
from .quantizer import N_CELLS

CLASS_NAMES = ("plus", "minus", "times", "divide")

# Row-major active cells of each mold shape.
CLASS_MASKS: dict[str, tuple[int, ...]] = {
    "plus": (1, 3, 4, 5, 7),
    "minus": (3, 4, 5),
    "times": (0, 2, 4, 6, 8),
    "divide": (2, 4, 6),
}

MAX_CODE = 3


def featurize(reports: Sequence[WindowReport]) -> np.ndarray:
    """Per-channel maximum code over a press, divided by the top code."""
    active = [r for r in reports if r.active]
    if not active:
        raise DomainError("no active window in the press")
    maxima = np.max([r.max_codes for r in reports], axis=0)
    return maxima.astype(float) / MAX_CODE


@dataclass(frozen=True)
class SymbolSample:
    features: tuple[float, ...]
    label: int

    def __post_init__(self):
        if len(self.features) != N_CELLS:
            raise DomainError(f"feature vector needs {N_CELLS} entries")
        if any(not 0.0 <= f <= 1.0 for f in self.features):
            raise DomainError("features must lie in [0, 1]")
        if not 0 <= self.label < len(CLASS_NAMES):
            raise DomainError("label out of range")


@dataclass(frozen=True)
class SymbolDataset:
    samples: tuple[SymbolSample, ...]
    seed: int
    noise: float
    n_per_class: int

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        x = np.array([s.features for s in self.samples])
        y = np.array([s.label for s in self.samples], dtype=int)
        return x, y


# Pressure bands for the synthetic presses (kPa).
ACTIVE_PRESSURE_KPA = (40.0, 100.0)
NOISE_PRESSURE_MAX_KPA = 2.0
PRESS_DURATION_MS = (1000.0, 1500.0)


def gen_symbol_dataset(
    seed: int,
    n_per_class: int,
    noise: float = 1.0,
    scenario=None,
) -> SymbolDataset:
    """Synthesize presses through the full pipeline and featurize them.

    Active cells take pressure in [40, 100] kPa, inactive cells in
    [0, 2*noise] kPa (noise=0 leaves them untouched), and each press duration
    jitters independently. `scenario` overrides the default pipeline config.
    """
    if n_per_class < 1:
        raise DomainError("need at least one sample per class")
    if noise < 0:
        raise DomainError("noise scale cannot be negative")
    from .pipeline import PressEvent, PressProgram, ScenarioConfig, run_scenario

    base = scenario or ScenarioConfig()
    rng = np.random.default_rng(seed)
    samples: list[SymbolSample] = []
    for label, name in enumerate(CLASS_NAMES):
        mask = CLASS_MASKS[name]
        for _ in range(n_per_class):
            duration = float(rng.uniform(*PRESS_DURATION_MS))
            grid = np.zeros(N_CELLS)
            for cell in mask:
                grid[cell] = rng.uniform(*ACTIVE_PRESSURE_KPA)
            for cell in range(N_CELLS):
                if cell not in mask and noise > 0:
                    grid[cell] = rng.uniform(0.0, NOISE_PRESSURE_MAX_KPA * noise)
            events = [
                PressEvent(t_ms=0.0, cell=c, kind="press", pressure_kpa=float(grid[c]))
                for c in range(N_CELLS) if grid[c] > 0
            ] + [
                PressEvent(t_ms=duration, cell=c, kind="release")
                for c in range(N_CELLS) if grid[c] > 0
            ]
            program = PressProgram(events=tuple(events), duration_ms=duration + 400.0)
            report = run_scenario(base.with_stimulus(program))
            features = featurize(report.windows)
            samples.append(SymbolSample(features=tuple(float(f) for f in features), label=label))
    return SymbolDataset(
        samples=tuple(samples), seed=seed, noise=noise, n_per_class=n_per_class
    )


def split_dataset(
    dataset: SymbolDataset, holdout_frac: float = 0.2, seed: int = 0
) -> tuple[tuple[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]:
    """Seeded shuffle then (train, holdout) arrays split."""
    x, y = dataset.arrays()
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(y))
    n_hold = int(round(len(y) * holdout_frac))
    hold, keep = order[:n_hold], order[n_hold:]
    return (x[keep], y[keep]), (x[hold], y[hold])


def write_dataset_csv(dataset: SymbolDataset, dest: IO[str]) -> None:
    writer = csv.writer(dest)
    writer.writerow([f"f{i}" for i in range(N_CELLS)] + ["label", "seed", "noise"])
    for s in dataset.samples:
        writer.writerow([repr(float(v)) for v in s.features] + [s.label, dataset.seed, dataset.noise])


def read_dataset_csv(source: IO[str]) -> SymbolDataset:
    reader = csv.DictReader(source)
    cols = [f"f{i}" for i in range(N_CELLS)] + ["label"]
    if reader.fieldnames is None or set(cols) - set(reader.fieldnames):
        raise FormatError("dataset CSV missing feature/label columns")
    samples = []
    seed, noise = 0, 0.0
    for row in reader:
        samples.append(SymbolSample(
            features=tuple(float(row[f"f{i}"]) for i in range(N_CELLS)),
            label=int(row["label"]),
        ))
        seed = int(row.get("seed", 0) or 0)
        noise = float(row.get("noise", 0.0) or 0.0)
    counts = {}
    for s in samples:
        counts[s.label] = counts.get(s.label, 0) + 1
    return SymbolDataset(
        samples=tuple(samples), seed=seed, noise=noise,
        n_per_class=max(counts.values()) if counts else 0,
    )
