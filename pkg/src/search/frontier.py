"""Speed/accuracy boundary of the trained set.

``x`` is on the frontier unless some trained ``w`` is strictly faster
and strictly more accurate. Latency ties therefore keep every tied
record whose accuracy beats all strictly faster ones.
"""

from __future__ import annotations

import math
from collections.abc import Iterable

from src.search.records import TrainedRecord


def record_order(record: TrainedRecord) -> tuple:
    """Latency, then higher accuracy, then code text."""
    return (record.latency, -record.accuracy, str(record.code))


def frontier(records: Iterable[TrainedRecord]) -> list[TrainedRecord]:
    ordered = sorted(records, key=record_order)
    members: list[TrainedRecord] = []
    best_faster = -math.inf
    i = 0
    while i < len(ordered):
        j = i
        while j < len(ordered) and ordered[j].latency == ordered[i].latency:
            j += 1
        tied = ordered[i:j]
        members.extend(r for r in tied if r.accuracy >= best_faster)
        best_faster = max(best_faster, max(r.accuracy for r in tied))
        i = j
    return members


def best_faster_or_equal(w: TrainedRecord, records: Iterable[TrainedRecord]) -> TrainedRecord:
    """Fastest record at least as accurate as *w*; *w* itself always qualifies."""
    candidates = [y for y in records if y.accuracy >= w.accuracy]
    if not candidates:
        return w
    return min(candidates, key=record_order)


def best_faster_for_all(records: Iterable[TrainedRecord]) -> dict:
    """``best_faster_or_equal`` for every record at once, keyed by code."""
    by_accuracy = sorted(records, key=lambda r: -r.accuracy)
    result: dict = {}
    best: TrainedRecord | None = None
    i = 0
    while i < len(by_accuracy):
        j = i
        while j < len(by_accuracy) and by_accuracy[j].accuracy == by_accuracy[i].accuracy:
            j += 1
        group = by_accuracy[i:j]
        for r in group:
            if best is None or record_order(r) < record_order(best):
                best = r
        for r in group:
            result[r.code] = best
        i = j
    return result


def binned_frontier(records: Iterable[TrainedRecord], bin_ms: float) -> list[TrainedRecord]:
    """Most accurate frontier member in each ``[k*bin_ms, (k+1)*bin_ms)`` latency bin."""
    if bin_ms <= 0:
        raise ValueError(f"bin width must be positive, got {bin_ms}")
    bins: dict[int, TrainedRecord] = {}
    for r in frontier(records):
        k = math.floor(r.latency / bin_ms)
        current = bins.get(k)
        if current is None or (-r.accuracy, r.latency, str(r.code)) < (-current.accuracy, current.latency, str(current.code)):
            bins[k] = r
    return [bins[k] for k in sorted(bins)]
