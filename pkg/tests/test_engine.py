"""Tests for the Partial Order Pruning search loop.

The central check runs the search to exhaustion on small spaces whose
oracle and latency table both grow strictly along the precedence order,
then compares against the brute-force Pareto frontier of the whole space.
"""

import pytest

from src.errors import EmptySpaceError, EvaluatorError, EvaluatorOutputError
from src.evaluators.base import Evaluator
from src.evaluators.replay import ReplayEvaluator
from src.evaluators.synthetic import SyntheticEvaluator, SyntheticOracleParams, synthetic_accuracy
from src.latency.synthetic import decoder_universe, synthetic_table
from src.latency.table import LatencyBand
from src.search.engine import PartialOrderPruning, SearchConfig, pop_search
from src.search.pruning import is_pruned
from src.search.records import format_records
from src.search.spaces import BackboneSpace, DecoderSpace, ExplicitSpace
from src.space.arch_space import BlockKind, parse_code
from tests.conftest import CLASSES, RESOLUTION, SMALL_ALPHABET, make_table

EXHAUST = 10**9


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

class _MapEvaluator(Evaluator):
    concurrency_safe = True

    def __init__(self, accuracies):
        self.accuracies = accuracies

    def evaluate(self, element):
        return self.accuracies[element]


class _FailingEvaluator(Evaluator):
    def evaluate(self, element):
        raise RuntimeError("GPU on fire")


def _brute_frontier(space, params=SyntheticOracleParams()):
    scored = [(e, space.latency(e), synthetic_accuracy(e, params)) for e in space.elements()]
    return {
        str(x) for x, lat_x, acc_x in scored
        if not any(lat_w < lat_x and acc_w > acc_x for _, lat_w, acc_w in scored)
    }


def _backbone_space(table_seed=0, band=None, alphabet=SMALL_ALPHABET, max_blocks=2):
    table = make_table(alphabet, seed=table_seed)
    space = BackboneSpace(table, alphabet=alphabet, resolution=RESOLUTION, classes=CLASSES,
                          max_blocks_per_stage=max_blocks)
    if band is None:
        return space
    lo, hi = band
    ordered = sorted(space.latency(e) for e in space.elements())
    cut = LatencyBand(t_min=ordered[int(lo * (len(ordered) - 1))], t_max=ordered[int(hi * (len(ordered) - 1))])
    return BackboneSpace(table, cut, alphabet, resolution=RESOLUTION, classes=CLASSES,
                         max_blocks_per_stage=max_blocks)


def _decoder_space(table_seed=0):
    backbone = parse_code("[(64),(128),(256)]")
    table = synthetic_table(decoder_universe(backbone, 19, RESOLUTION), seed=table_seed)
    return DecoderSpace(19, table=table, backbone=backbone, resolution=RESOLUTION)


def _check_sound(space, seed, **config):
    engine = PartialOrderPruning(space, SyntheticEvaluator(), SearchConfig(seed=seed, patience=EXHAUST, **config))
    result = engine.run()
    expected = _brute_frontier(space)
    assert result.statistics.stop_reason == "exhausted"
    assert {str(r.code) for r in result.frontier} == expected
    assert not {str(m) for m in engine.pruned} & expected
    assert engine.trained | engine.pruned == set(space.elements())
    return engine, result


# ---------------------------------------------------------------------------
# Soundness
# ---------------------------------------------------------------------------

class TestSoundness:
    @pytest.mark.parametrize("seed", range(20))
    def test_backbone_space(self, seed):
        space = _backbone_space(table_seed=seed)
        assert len(space.elements()) <= 500
        _check_sound(space, seed)

    @pytest.mark.parametrize("seed,band", [(0, (0.0, 0.5)), (1, (0.3, 0.8)), (2, (0.5, 1.0)), (3, (0.1, 0.9))])
    def test_banded_backbone_space(self, seed, band):
        _check_sound(_backbone_space(table_seed=seed, band=band), seed)

    @pytest.mark.parametrize("seed", range(5))
    def test_bottleneck_space(self, seed):
        table = make_table(kind=BlockKind.BOTTLENECK, seed=seed)
        space = BackboneSpace(table, kind=BlockKind.BOTTLENECK, alphabet=SMALL_ALPHABET,
                              resolution=RESOLUTION, classes=CLASSES, max_blocks_per_stage=2)
        _check_sound(space, seed)

    @pytest.mark.parametrize("seed", range(5))
    def test_decoder_space(self, seed):
        space = _decoder_space(table_seed=seed)
        assert len(space.elements()) == 216
        _check_sound(space, seed)

    @pytest.mark.parametrize("seed", range(3))
    def test_precedent_weighted_sampling(self, seed):
        _check_sound(_backbone_space(table_seed=seed), seed, strategy="precedents")

    @pytest.mark.parametrize("seed", range(3))
    def test_batched_evaluation(self, seed):
        _check_sound(_backbone_space(table_seed=seed), seed, batch_size=4)

    @pytest.mark.parametrize("seed", range(5))
    def test_pruned_set_matches_certificates(self, seed):
        space = _backbone_space(table_seed=seed)
        engine = PartialOrderPruning(space, SyntheticEvaluator(), SearchConfig(seed=seed, max_evaluations=40))
        engine.run()
        scanned = {e for e in space.elements() if is_pruned(e, engine.certificates, space)}
        assert scanned == engine.pruned


# ---------------------------------------------------------------------------
# Effectiveness
# ---------------------------------------------------------------------------

class TestEffectiveness:
    @pytest.fixture(scope="class")
    def space(self):
        alphabet = (64, 128, 256, 512)
        table = make_table(alphabet, resolution=224, classes=1000)
        return BackboneSpace(table, alphabet=alphabet, resolution=224, classes=1000, max_blocks_per_stage=3)

    def test_space_size(self, space):
        assert len(space.elements()) == 2484

    @pytest.mark.parametrize("seed", range(5))
    def test_acceleration(self, space, seed):
        result = pop_search(space, SyntheticEvaluator(), SearchConfig(seed=seed, patience=EXHAUST))
        stats = result.statistics
        assert stats.trained + stats.skipped == stats.space_size
        assert stats.acceleration >= 1.5


# ---------------------------------------------------------------------------
# Loop behaviour
# ---------------------------------------------------------------------------

class TestSearchLoop:
    def test_single_element(self):
        space = ExplicitSpace({"x": 1.0}, precedes_fn=lambda a, b: False)
        result = pop_search(space, _MapEvaluator({"x": 0.5}))
        assert [r.code for r in result.frontier] == ["x"]
        assert result.statistics.trained == 1
        assert result.statistics.stop_reason == "exhausted"

    def test_precedent_weights_follow_space_relation(self):
        rank = {"a": 0, "b": 1, "c": 2}
        space = ExplicitSpace({"a": 1.0, "b": 2.0, "c": 3.0}, precedes_fn=lambda x, y: rank[x] < rank[y])
        engine = PartialOrderPruning(space, _MapEvaluator({}), SearchConfig(strategy="precedents"))
        weights = dict(zip(engine.elements, engine._weights))
        assert weights == {"a": 1.0, "b": 2.0, "c": 3.0}

    def test_empty_space(self):
        with pytest.raises(EmptySpaceError):
            pop_search(ExplicitSpace({}), _MapEvaluator({}))

    def test_empty_band(self, small_table):
        space = BackboneSpace(small_table, LatencyBand(t_min=0.0, t_max=1e-6), SMALL_ALPHABET,
                              resolution=RESOLUTION, classes=CLASSES, max_blocks_per_stage=2)
        with pytest.raises(EmptySpaceError):
            pop_search(space, SyntheticEvaluator())

    def test_max_evaluations(self):
        space = _backbone_space()
        result = pop_search(space, SyntheticEvaluator(), SearchConfig(max_evaluations=5))
        assert result.statistics.trained == 5
        assert result.statistics.stop_reason == "max_evaluations"

    def test_patience(self):
        latencies = {f"e{i}": float(i + 1) for i in range(50)}
        accuracies = {code: 1.0 - lat / 100 for code, lat in latencies.items()}
        space = ExplicitSpace(latencies, precedes_fn=lambda a, b: False)
        result = pop_search(space, _MapEvaluator(accuracies), SearchConfig(seed=0, patience=3))
        assert result.statistics.stop_reason == "patience"
        assert result.statistics.trained < 50
        assert [h.frontier_changed for h in result.history[-3:]] == [False] * 3

    def test_history_bookkeeping(self):
        space = _backbone_space()
        result = pop_search(space, SyntheticEvaluator(), SearchConfig(seed=4, patience=EXHAUST))
        history = result.history
        assert [h.iteration for h in history] == list(range(1, len(history) + 1))
        assert [h.trained for h in history] == list(range(1, len(history) + 1))
        pruned = [h.pruned for h in history]
        assert pruned == sorted(pruned)
        assert history[0].frontier_changed
        assert len({str(h.code) for h in history}) == len(history)

    def test_statistics(self):
        space = _backbone_space()
        result = pop_search(space, SyntheticEvaluator(), SearchConfig(seed=1, patience=EXHAUST))
        stats = result.statistics
        assert stats.iterations == stats.trained == len(result.records)
        assert stats.space_size == len(space.elements())
        assert stats.acceleration == pytest.approx((stats.trained + stats.skipped) / stats.trained)
        assert stats.pruned >= stats.skipped
        assert stats.frontier_size == len(result.frontier)

    def test_binned_frontier_reported(self):
        space = _backbone_space()
        result = pop_search(space, SyntheticEvaluator(), SearchConfig(seed=0, patience=EXHAUST, report_bin_ms=0.01))
        assert result.binned_frontier
        assert {str(r.code) for r in result.binned_frontier} <= {str(r.code) for r in result.frontier}

    def test_deterministic(self):
        space = _backbone_space()
        config = SearchConfig(seed=7, patience=5)
        a = pop_search(space, SyntheticEvaluator(), config)
        b = pop_search(space, SyntheticEvaluator(), config)
        assert a.history == b.history
        assert format_records(a.frontier) == format_records(b.frontier)

    def test_batches_are_deterministic(self):
        space = _backbone_space()
        config = SearchConfig(seed=3, batch_size=5, max_evaluations=30)
        a = pop_search(space, SyntheticEvaluator(), config)
        b = pop_search(space, SyntheticEvaluator(), config)
        assert a.history == b.history

    def test_sampled_space(self, small_table):
        space = BackboneSpace(small_table, alphabet=SMALL_ALPHABET, resolution=RESOLUTION, classes=CLASSES,
                              max_blocks_per_stage=2, materialize=False)
        result = pop_search(space, SyntheticEvaluator(), SearchConfig(seed=0, max_evaluations=20, patience=EXHAUST))
        assert result.statistics.trained == 20
        assert result.statistics.pruned is None
        assert all(h.pruned is None for h in result.history)
        assert len({str(r.code) for r in result.records}) == 20


# ---------------------------------------------------------------------------
# Evaluator failures
# ---------------------------------------------------------------------------

class TestEvaluatorFailures:
    def test_failure_names_element(self):
        space = ExplicitSpace({"x": 1.0}, precedes_fn=lambda a, b: False)
        with pytest.raises(EvaluatorError, match=r"while evaluating x"):
            pop_search(space, _FailingEvaluator())

    def test_out_of_range_accuracy(self):
        space = ExplicitSpace({"x": 1.0}, precedes_fn=lambda a, b: False)
        with pytest.raises(EvaluatorOutputError):
            pop_search(space, _MapEvaluator({"x": 1.5}))

    def test_missing_replay_record(self):
        space = ExplicitSpace({"x": 1.0}, precedes_fn=lambda a, b: False)
        with pytest.raises(EvaluatorError, match="No recorded accuracy"):
            pop_search(space, ReplayEvaluator({}))


class TestSearchConfig:
    @pytest.mark.parametrize("kwargs", [{"patience": 0}, {"report_bin_ms": 0.0}, {"batch_size": 0}])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            SearchConfig(**kwargs)
