"""Banded subspace enumeration by depth-first branch and bound.

Codes are grown one block at a time. Every table entry is positive and
latency is additive, so a partial code whose committed cost plus the
cheapest legal completion already exceeds ``t_max`` can be abandoned
with all of its extensions.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable
from functools import lru_cache

from src.latency.table import LatencyBand, LatencyTable
from src.space.arch_space import (
    DEFAULT_ALPHABET,
    DEFAULT_STEM,
    NUM_STAGES,
    RESOLUTION_DIVISOR,
    ArchitectureCode,
    BlockKind,
    check_resolution,
    head_config,
    stage_block,
    stage_input_resolution,
    stem_configs,
)

logger = logging.getLogger("popnas")

# Relative slack on the bound: tail sums associate differently from the
# final left-to-right total.
_BOUND_SLACK = 1e-9


class _BranchAndBound:
    def __init__(
        self,
        band: LatencyBand,
        table: LatencyTable,
        alphabet: Iterable[int],
        kind: BlockKind,
        resolution: int,
        classes: int,
        max_blocks_per_stage: int,
        stem: tuple[int, int],
    ) -> None:
        check_resolution(resolution)
        self.band = band
        self.table = table
        self.widths = sorted(set(alphabet))
        self.kind = kind
        self.resolution = resolution
        self.classes = classes
        self.cap = max_blocks_per_stage
        self.stem = tuple(stem)
        probe = ArchitectureCode.model_construct(stages=((1,), (1,), (1,)), block_kind=kind, stem=self.stem)
        self.layer_kinds = [probe.stage_layer_kind(s) for s in range(NUM_STAGES)]
        self.limit = band.t_max + _BOUND_SLACK * max(1.0, band.t_max) if math.isfinite(band.t_max) else math.inf
        self.found: dict[ArchitectureCode, float] = {}
        self.min_tail = lru_cache(maxsize=None)(self._min_tail)

    def _block(self, stage: int, c_in: int, width: int, first: bool):
        resolution = stage_input_resolution(self.resolution, stage)
        if not first:
            resolution //= 2
        config = stage_block(self.layer_kinds[stage], c_in, width, resolution, first)
        return config, self.table.lookup(config)

    def _head(self, c_in: int) -> float:
        return self.table.lookup(head_config(c_in, self.resolution // RESOLUTION_DIVISOR, self.classes))

    def _min_tail(self, stage: int, count: int, c_out: int, width: int) -> float:
        """Cheapest cost to finish a code whose current stage already has *count* blocks."""
        if stage == NUM_STAGES - 1:
            best = self._head(c_out)
        else:
            best = math.inf
            for w in self.widths:
                if w < width:
                    continue
                config, cost = self._block(stage + 1, c_out, w, first=True)
                best = min(best, cost + self.min_tail(stage + 1, 1, config.c_out, w))
        if count >= self.cap:
            return best
        for w in self.widths:
            if w <= width:
                continue
            config, cost = self._block(stage, c_out, w, first=False)
            best = min(best, cost + self.min_tail(stage, count + 1, config.c_out, w))
        return best

    def run(self) -> dict[ArchitectureCode, float]:
        base = 0.0
        for config in stem_configs(self.resolution, self.stem):
            base += self.table.lookup(config)
        self._extend(0, ([], [], []), self.stem[1], 0, base)
        return self.found

    def _extend(self, stage: int, stages: tuple[list[int], ...], c_out: int, width: int, cost: float) -> None:
        count = len(stages[stage])
        if count:
            if stage == NUM_STAGES - 1:
                total = cost + self._head(c_out)
                if total in self.band:
                    code = ArchitectureCode.model_construct(
                        stages=tuple(tuple(s) for s in stages), block_kind=self.kind, stem=self.stem,
                    )
                    self.found[code] = total
            else:
                self._extend(stage + 1, stages, c_out, width, cost)
        if count >= self.cap:
            return
        for w in self.widths:
            if w < width:
                continue
            config, block_cost = self._block(stage, c_out, w, first=count == 0)
            new_cost = cost + block_cost
            if new_cost + self.min_tail(stage, count + 1, config.c_out, w) > self.limit:
                continue
            stages[stage].append(w)
            self._extend(stage, stages, config.c_out, w, new_cost)
            stages[stage].pop()


def enumerate_subspace(
    band: LatencyBand,
    table: LatencyTable,
    alphabet: Iterable[int] = DEFAULT_ALPHABET,
    kind: BlockKind = BlockKind.BASIC,
    resolution: int = 224,
    classes: int = 1000,
    max_blocks_per_stage: int = 32,
    stem: tuple[int, int] = DEFAULT_STEM,
) -> dict[ArchitectureCode, float]:
    """Every valid code whose estimated latency lies in *band*, mapped to that latency.

    Keys come out in depth-first order, which is deterministic for fixed inputs.
    """
    found = _BranchAndBound(band, table, alphabet, kind, resolution, classes, max_blocks_per_stage, stem).run()
    logger.info("Enumerated %d architectures in [%g, %g] ms", len(found), band.t_min, band.t_max)
    return found
