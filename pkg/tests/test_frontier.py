"""Tests for the speed/accuracy frontier and fastest-as-accurate lookups."""

import numpy as np
import pytest

from src.search.frontier import (
    best_faster_for_all,
    best_faster_or_equal,
    binned_frontier,
    frontier,
    record_order,
)
from src.search.records import TrainedRecord


def _rec(code: str, latency: float, accuracy: float) -> TrainedRecord:
    return TrainedRecord(code=code, latency=latency, accuracy=accuracy)


def _random_records(seed: int, n: int = 50) -> list[TrainedRecord]:
    # Coarse grids so latency and accuracy ties show up.
    rng = np.random.default_rng(seed)
    lat = rng.integers(1, 15, size=n)
    acc = rng.integers(0, 11, size=n)
    return [_rec(f"c{i}", float(lat[i]), float(acc[i]) / 10) for i in range(n)]


def _brute_frontier(records):
    return {
        x.code for x in records
        if all(w.latency >= x.latency or w.accuracy <= x.accuracy for w in records)
    }


# ---------------------------------------------------------------------------
# frontier
# ---------------------------------------------------------------------------

class TestFrontier:
    def test_empty(self):
        assert frontier([]) == []

    def test_singleton(self):
        r = _rec("a", 2.0, 0.70)
        assert frontier([r]) == [r]

    def test_dominated_dropped(self):
        fast = _rec("a", 2.0, 0.70)
        assert frontier([fast, _rec("b", 3.0, 0.69)]) == [fast]

    def test_slower_but_more_accurate_kept(self):
        records = [_rec("a", 2.0, 0.70), _rec("b", 3.0, 0.75)]
        assert [r.code for r in frontier(records)] == ["a", "b"]

    def test_equal_latency_keeps_both(self):
        records = [_rec("a", 2.0, 0.70), _rec("b", 2.0, 0.60)]
        assert {r.code for r in frontier(records)} == {"a", "b"}

    def test_equal_accuracy_keeps_slower(self):
        records = [_rec("a", 2.0, 0.70), _rec("b", 3.0, 0.70)]
        assert {r.code for r in frontier(records)} == {"a", "b"}

    @pytest.mark.parametrize("seed", range(20))
    def test_matches_brute_force(self, seed):
        records = _random_records(seed)
        assert {r.code for r in frontier(records)} == _brute_frontier(records)

    @pytest.mark.parametrize("seed", range(5))
    def test_idempotent(self, seed):
        once = frontier(_random_records(seed))
        assert frontier(once) == once

    @pytest.mark.parametrize("seed", range(5))
    def test_members_do_not_dominate_each_other(self, seed):
        members = frontier(_random_records(seed))
        for x in members:
            for w in members:
                assert not (w.latency < x.latency and w.accuracy > x.accuracy)

    def test_sorted_by_latency(self):
        members = frontier(_random_records(0))
        assert members == sorted(members, key=record_order)


# ---------------------------------------------------------------------------
# best_faster_or_equal
# ---------------------------------------------------------------------------

class TestBestFasterOrEqual:
    def test_self(self):
        w = _rec("w", 3.0, 0.69)
        assert best_faster_or_equal(w, [w]) == w

    def test_faster_and_better(self):
        w, y = _rec("w", 3.0, 0.69), _rec("y", 2.0, 0.70)
        assert best_faster_or_equal(w, [w, y]) == y

    def test_latency_tie_prefers_accuracy_then_code(self):
        w = _rec("w", 3.0, 0.5)
        a, b, c = _rec("b", 2.0, 0.6), _rec("a", 2.0, 0.6), _rec("c", 2.0, 0.9)
        assert best_faster_or_equal(w, [w, a, b, c]) == c
        assert best_faster_or_equal(w, [w, a, b]) == b

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_scan(self, seed):
        records = _random_records(seed)
        every = best_faster_for_all(records)
        for w in records:
            expected = min((y for y in records if y.accuracy >= w.accuracy), key=record_order)
            assert best_faster_or_equal(w, records) == expected
            assert every[w.code] == expected


# ---------------------------------------------------------------------------
# binned_frontier
# ---------------------------------------------------------------------------

class TestBinnedFrontier:
    def test_best_per_bin(self):
        records = [
            _rec("a", 1.2, 0.60), _rec("b", 1.8, 0.65),
            _rec("c", 2.5, 0.70), _rec("d", 2.9, 0.66), _rec("e", 4.1, 0.72),
        ]
        assert [r.code for r in binned_frontier(records, 1.0)] == ["b", "c", "e"]

    def test_only_frontier_members(self):
        records = [_rec("a", 1.0, 0.9), _rec("b", 5.5, 0.5)]
        assert [r.code for r in binned_frontier(records, 1.0)] == ["a"]

    def test_bin_must_be_positive(self):
        with pytest.raises(ValueError):
            binned_frontier([], 0.0)
