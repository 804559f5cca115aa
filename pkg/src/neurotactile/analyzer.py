"""Window reduction, adjacent-difference peak counting, and gap segmentation.

Peak counting walks adjacent differences with a tiny state machine: a rise
arms it, the first fall afterwards counts one peak, zero differences change
nothing. That counts rise-then-fall pairs, i.e. local maxima after equal-run
collapsing, so a multi-sample fall is not overcounted.

Segmentation splits the window stream on runs of peak-free windows: a short
run ends a segment (one tap), a longer run ends a letter group.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import IO, Iterable, Sequence

from .errors import ContractError, DomainError
from .quantizer import N_CELLS, CodeFrame


def count_peaks(values: Sequence[float]) -> int:
    """Number of rise-then-fall pairs in an ordered sequence."""
    if len(values) == 0:
        raise DomainError("cannot count peaks of an empty sequence")
    count = 0
    rising = False
    for prev, cur in zip(values, values[1:]):
        d = cur - prev
        if d > 0:
            rising = True
        elif d < 0 and rising:
            count += 1
            rising = False
    return count


@dataclass(frozen=True)
class WindowReport:
    window_idx: int
    t_start_ms: float
    max_codes: tuple[int, ...]
    peak_counts: tuple[int, ...]
    active: bool

    @property
    def pooled_peaks(self) -> int:
        return sum(self.peak_counts)

    def to_dict(self) -> dict:
        return {
            "window": self.window_idx,
            "t_start_ms": self.t_start_ms,
            "max": list(self.max_codes),
            "peaks": list(self.peak_counts),
            "active": self.active,
        }


def window_reduce(
    frames: Sequence[CodeFrame],
    expected_frames: int,
    window_idx: int = 0,
    t_start_ms: float = 0.0,
) -> WindowReport:
    """Per-channel max code and peak count over one window of code frames."""
    if len(frames) != expected_frames:
        raise ContractError(
            f"window needs exactly {expected_frames} frames, got {len(frames)}"
        )
    channels = [[f.codes[c] for f in frames] for c in range(N_CELLS)]
    max_codes = tuple(max(ch) for ch in channels)
    peak_counts = tuple(count_peaks(ch) for ch in channels)
    return WindowReport(
        window_idx=window_idx,
        t_start_ms=t_start_ms,
        max_codes=max_codes,
        peak_counts=peak_counts,
        active=any(c > 0 for c in max_codes),
    )


@dataclass(frozen=True)
class Segment:
    start_window: int
    end_window: int
    total_count: int
    channel_counts: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "start_window": self.start_window,
            "end_window": self.end_window,
            "total_count": self.total_count,
            "channel_counts": list(self.channel_counts),
        }


class SegmentClass(Enum):
    DOT = "dot"
    DASH = "dash"
    CONTINUOUS = "continuous"


def classify_segment(total_count: int) -> SegmentClass:
    """Counts in [0, 10) are a dot, [10, 20) a dash, 20 and over continuous."""
    if total_count < 0:
        raise DomainError("peak count cannot be negative")
    if total_count < 10:
        return SegmentClass.DOT
    if total_count < 20:
        return SegmentClass.DASH
    return SegmentClass.CONTINUOUS


class SegmentTracker:
    """Incremental gap-based segmentation of a window-report stream.

    feed() returns the segments and letter groups completed by that window;
    flush() closes anything still open at end of stream. Single consumer,
    ordered delivery.
    """

    def __init__(self, gap_windows: int = 1, letter_gap_windows: int = 3):
        if gap_windows < 1:
            raise ContractError("gap_windows must be at least 1")
        if letter_gap_windows <= gap_windows:
            raise ContractError("letter gap must exceed the segment gap")
        self.gap_windows = gap_windows
        self.letter_gap_windows = letter_gap_windows
        self._zero_run = 0
        self._open: list[WindowReport] = []
        self._letter: list[Segment] = []

    def _close_segment(self) -> Segment | None:
        if not self._open:
            return None
        per_channel = tuple(
            sum(r.peak_counts[c] for r in self._open) for c in range(N_CELLS)
        )
        seg = Segment(
            start_window=self._open[0].window_idx,
            end_window=self._open[-1].window_idx,
            total_count=sum(per_channel),
            channel_counts=per_channel,
        )
        self._open = []
        self._letter.append(seg)
        return seg

    def feed(self, report: WindowReport) -> tuple[Segment | None, list[Segment] | None]:
        """Returns (segment closed by this window, letter closed by this window)."""
        closed_segment = None
        closed_letter = None
        if report.pooled_peaks > 0:
            self._zero_run = 0
            self._open.append(report)
        else:
            self._zero_run += 1
            if self._zero_run == self.gap_windows:
                closed_segment = self._close_segment()
            if self._zero_run == self.letter_gap_windows and self._letter:
                closed_letter = self._letter
                self._letter = []
        return closed_segment, closed_letter

    def flush(self) -> tuple[Segment | None, list[Segment] | None]:
        """Close the trailing partial segment/letter at end of stream."""
        closed_segment = self._close_segment()
        closed_letter = self._letter or None
        self._letter = []
        self._zero_run = 0
        return closed_segment, closed_letter


def segment_stream(
    reports: Iterable[WindowReport],
    gap_windows: int = 1,
    letter_gap_windows: int = 3,
) -> list[list[Segment]]:
    """Group a report stream into letters (lists of segments)."""
    tracker = SegmentTracker(gap_windows, letter_gap_windows)
    letters: list[list[Segment]] = []
    for report in reports:
        _, letter = tracker.feed(report)
        if letter:
            letters.append(letter)
    _, letter = tracker.flush()
    if letter:
        letters.append(letter)
    return letters


def write_reports_jsonl(reports: Iterable[WindowReport], dest: IO[str]) -> None:
    for r in reports:
        dest.write(json.dumps(r.to_dict()) + "\n")


def write_segments_jsonl(letters: Iterable[Sequence[Segment]], dest: IO[str]) -> None:
    for letter_idx, letter in enumerate(letters):
        for seg in letter:
            record = dict(seg.to_dict(), letter=letter_idx,
                          symbol=classify_segment(seg.total_count).value)
            dest.write(json.dumps(record) + "\n")
