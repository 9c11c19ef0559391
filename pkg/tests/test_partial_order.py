"""Tests for precedence between backbones."""

import networkx as nx
import numpy as np
import pytest

from src.space.arch_space import depth, enumerate_codes, parse_code, random_code
from src.space.decoder_space import decoder_precedes, parse_decoder_code
from src.space.partial_order import (
    Precedence,
    compare,
    count_precedents,
    elementary_shrinks,
    precedent_counts,
    precedents,
    precedes,
)

ALPHABET = (64, 128, 256)


def _code(text: str):
    return parse_code(text, ALPHABET)


def _random_walk_down(code, rng, steps):
    """Apply up to *steps* random elementary shrinks."""
    for _ in range(steps):
        options = sorted(elementary_shrinks(code, ALPHABET), key=str)
        if not options:
            break
        code = options[int(rng.integers(len(options)))]
    return code


# ---------------------------------------------------------------------------
# precedes
# ---------------------------------------------------------------------------

class TestPrecedes:
    def test_narrower_same_depth(self):
        assert precedes(_code("[(128),(256),(256)]"), parse_code("[(128),(256),(512)]"))

    def test_shallower_same_width(self):
        assert precedes(_code("[(128),(256),(256)]"), _code("[(128),(256,256),(256)]"))

    def test_strict(self):
        x = _code("[(64),(64),(64)]")
        assert not precedes(x, x)

    def test_not_a_dominated_subsequence(self):
        assert not precedes(_code("[(64,128),(128),(128)]"), _code("[(64),(128,128),(128)]"))

    def test_multi_step(self):
        assert precedes(_code("[(64),(64),(64)]"), _code("[(64,128),(128,256),(256,256)]"))

    def test_different_kind_incomparable(self):
        x = _code("[(64),(64),(64)]")
        y = _code("[(64),(64),(128)]@bottleneck")
        assert not precedes(x, y)
        assert compare(x, y) is Precedence.INCOMPARABLE

    def test_different_stem_incomparable(self):
        x = parse_code("[(64),(64),(64)]", ALPHABET, stem=(16, 32))
        y = _code("[(64),(64),(128)]")
        assert not precedes(x, y)


class TestCompare:
    def test_outcomes(self):
        a = _code("[(64),(64),(64)]")
        b = _code("[(64),(64),(128)]")
        c = _code("[(128),(128),(128)]")
        d = _code("[(64,64),(64),(64)]")
        assert compare(a, a) is Precedence.EQUAL
        assert compare(a, b) is Precedence.PRECEDES_STRICT
        assert compare(b, a) is Precedence.SUCCEEDS_STRICT
        assert compare(c, d) is Precedence.INCOMPARABLE


# ---------------------------------------------------------------------------
# Order axioms
# ---------------------------------------------------------------------------

class TestOrderAxioms:
    def test_irreflexive_and_antisymmetric(self):
        rng = np.random.default_rng(0)
        for _ in range(10_000):
            x = random_code(rng, ALPHABET, max_blocks_per_stage=3)
            y = random_code(rng, ALPHABET, max_blocks_per_stage=3)
            assert not precedes(x, x)
            assert not (precedes(x, y) and precedes(y, x))

    def test_transitive(self):
        rng = np.random.default_rng(1)
        for _ in range(2_000):
            c = random_code(rng, ALPHABET, max_blocks_per_stage=4)
            b = _random_walk_down(c, rng, int(rng.integers(1, 4)))
            a = _random_walk_down(b, rng, int(rng.integers(1, 4)))
            if precedes(a, b) and precedes(b, c):
                assert precedes(a, c)

    def test_transitive_on_random_triples(self):
        rng = np.random.default_rng(2)
        for _ in range(10_000):
            a, b, c = (random_code(rng, ALPHABET, max_blocks_per_stage=2) for _ in range(3))
            if precedes(a, b) and precedes(b, c):
                assert precedes(a, c)

    def test_precedence_never_reduces_depth(self):
        space = enumerate_codes(ALPHABET, max_blocks_per_stage=2)
        for x in space:
            for y in space:
                if precedes(x, y):
                    assert depth(x) <= depth(y)
                    assert x.num_blocks <= y.num_blocks


# ---------------------------------------------------------------------------
# elementary_shrinks and closure
# ---------------------------------------------------------------------------

class TestElementaryShrinks:
    def test_bottom_has_none(self):
        assert elementary_shrinks(parse_code("[(64),(64),(64)]", (64, 128)), (64, 128)) == set()

    def test_only_lowering(self):
        got = elementary_shrinks(parse_code("[(64),(64),(128)]", (64, 128)), (64, 128))
        assert {str(m) for m in got} == {"[(64),(64),(64)]"}

    def test_only_deletion(self):
        got = elementary_shrinks(parse_code("[(64,64),(64),(64)]", (64, 128)), (64, 128))
        assert {str(m) for m in got} == {"[(64),(64),(64)]"}

    def test_lowering_respects_monotonicity(self):
        got = {str(m) for m in elementary_shrinks(_code("[(128),(128),(256)]"), ALPHABET)}
        assert got == {"[(64),(128),(256)]", "[(128),(128),(128)]"}

    def test_every_shrink_precedes(self):
        for x in enumerate_codes(ALPHABET, max_blocks_per_stage=2):
            for m in elementary_shrinks(x, ALPHABET):
                assert precedes(m, x)

    def test_closure_equivalence(self):
        """precedes agrees with reachability over elementary shrinks."""
        space = enumerate_codes(ALPHABET, max_blocks_per_stage=2)
        graph = nx.DiGraph()
        graph.add_nodes_from(space)
        for x in space:
            graph.add_edges_from((x, m) for m in elementary_shrinks(x, ALPHABET))
        assert set(graph.nodes) == set(space)
        below = {y: nx.descendants(graph, y) for y in space}
        mismatches = [
            (str(m), str(y))
            for y in space
            for m in space
            if precedes(m, y) != (m in below[y])
        ]
        assert mismatches == []


# ---------------------------------------------------------------------------
# Precedent counting
# ---------------------------------------------------------------------------

class TestCountPrecedents:
    @pytest.fixture
    def space(self):
        return enumerate_codes((64, 128), max_blocks_per_stage=1)

    def test_top(self, space):
        assert count_precedents(parse_code("[(128),(128),(128)]", (64, 128)), space) == 3

    def test_bottom(self, space):
        assert count_precedents(parse_code("[(64),(64),(64)]", (64, 128)), space) == 0

    def test_one_above_bottom(self, space):
        assert count_precedents(parse_code("[(64),(64),(128)]", (64, 128)), space) == 1

    def test_precedents_lists_them(self, space):
        x = parse_code("[(64),(128),(128)]", (64, 128))
        assert {str(m) for m in precedents(x, space)} == {"[(64),(64),(64)]", "[(64),(64),(128)]"}

    def test_counts_for_whole_space(self, space):
        counts = precedent_counts(space)
        assert sorted(counts.values()) == [0, 1, 2, 3]

    def test_counts_under_decoder_relation(self):
        codes = [parse_decoder_code(t) for t in ("19:[19,32,32]", "19:[19,32,64]", "19:[32,32,64]", "19:[19,64,32]")]
        counts = precedent_counts(codes, decoder_precedes)
        assert [counts[c] for c in codes] == [0, 1, 2, 1]
