"""Partial Order Pruning search loop.

Each iteration draws an untrained, unpruned element at random, evaluates
it, refreshes every prune certificate and recomputes the frontier. The
search stops when the frontier has not changed for ``patience``
iterations, the evaluation budget is spent, or nothing is left to draw.
"""

from __future__ import annotations

import asyncio
import logging
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, Field

from src.errors import EmptySpaceError, EvaluatorError, EvaluatorOutputError
from src.evaluators.base import Evaluator
from src.search.frontier import binned_frontier, frontier
from src.search.pruning import PruneCertificate, is_pruned, update_certificates
from src.search.records import IterationRecord, TrainedRecord
from src.search.spaces import SearchSpace
from src.space.partial_order import precedent_counts

logger = logging.getLogger("popnas")

StopReason = Literal["patience", "max_evaluations", "exhausted", "sampler_exhausted"]


class SearchConfig(BaseModel):
    seed: int = 0
    patience: int = Field(20, ge=1)
    max_evaluations: int | None = Field(None, ge=1)
    report_bin_ms: float | None = Field(None, gt=0)
    # "precedents" weights each candidate by 1 + its precedent count in the space
    strategy: Literal["uniform", "precedents"] = "uniform"
    batch_size: int = Field(1, ge=1)
    sample_retries: int = Field(1000, ge=1)


class SearchStatistics(BaseModel):
    trained: int
    # None when the space is not materialized
    pruned: int | None
    skipped: int | None
    acceleration: float | None
    iterations: int
    frontier_size: int
    space_size: int | None
    stop_reason: StopReason


class SearchResult(BaseModel):
    frontier: list[TrainedRecord]
    binned_frontier: list[TrainedRecord] | None = None
    records: list[TrainedRecord]
    history: list[IterationRecord]
    certificates: list[PruneCertificate]
    statistics: SearchStatistics


class PartialOrderPruning:
    """Owns the search state: trained records, certificates, pruned set, frontier."""

    def __init__(self, space: SearchSpace, evaluator: Evaluator, config: SearchConfig) -> None:
        self.space = space
        self.evaluator = evaluator
        self.config = config
        self.rng = np.random.default_rng(config.seed)
        self.elements = space.elements()
        self.records: list[TrainedRecord] = []
        self.trained: set[Any] = set()
        self.certificates: dict[Any, PruneCertificate] = {}
        self.pruned: set[Any] = set()
        self.history: list[IterationRecord] = []
        self.frontier: list[TrainedRecord] = []
        self._precedents: dict[Any, list[Any]] = {}
        self._weights: np.ndarray | None = None
        if self.elements is not None and not self.elements:
            raise EmptySpaceError("search space is empty")
        if self.elements is not None:
            self._position = {e: i for i, e in enumerate(self.elements)}
            # False once an element is trained or pruned
            self._open = np.ones(len(self.elements), dtype=bool)
        if config.strategy == "precedents":
            if self.elements is None:
                logger.warning("Precedent-weighted sampling needs a materialized space; using uniform")
            else:
                counts = precedent_counts(self.elements, space.precedes)
                self._weights = 1.0 + np.array([counts[x] for x in self.elements], dtype=float)
        if config.batch_size > 1 and not evaluator.concurrency_safe:
            logger.warning("Evaluator is not concurrency-safe; batches of %d run serially", config.batch_size)

    # ------------------------------------------------------------------
    # Selection
    # ------------------------------------------------------------------

    def _select_materialized(self, k: int) -> list[Any]:
        candidates = np.flatnonzero(self._open)
        if not len(candidates):
            return []
        k = min(k, len(candidates))
        p = None
        if self._weights is not None:
            weights = self._weights[candidates]
            p = weights / weights.sum()
        picks = self.rng.choice(len(candidates), size=k, replace=False, p=p)
        return [self.elements[int(candidates[i])] for i in picks]

    def _select_sampled(self, k: int) -> list[Any]:
        chosen: list[Any] = []
        while len(chosen) < k:
            for _ in range(self.config.sample_retries):
                e = self.space.sample(self.rng)
                if e in self.trained or e in chosen or not self.space.contains(e):
                    continue
                if is_pruned(e, self.certificates, self.space):
                    continue
                chosen.append(e)
                break
            else:
                logger.warning("No new element after %d sampling attempts", self.config.sample_retries)
                break
        return chosen

    def _select(self, k: int) -> list[Any]:
        if self.elements is not None:
            return self._select_materialized(k)
        return self._select_sampled(k)

    # ------------------------------------------------------------------
    # Evaluation
    # ------------------------------------------------------------------

    def _evaluate(self, element: Any) -> float:
        try:
            accuracy = self.evaluator.evaluate(element)
        except EvaluatorError as e:
            if e.element is not None:
                raise
            raise EvaluatorError(str(e), str(element)) from e
        except Exception as e:
            raise EvaluatorError(f"evaluator failed: {e}", str(element)) from e
        if not 0.0 <= accuracy <= 1.0:
            raise EvaluatorOutputError(f"accuracy {accuracy} outside [0, 1]", str(element))
        return float(accuracy)

    async def _evaluate_concurrently(self, batch: list[Any]) -> list[float]:
        return list(await asyncio.gather(*(asyncio.to_thread(self._evaluate, e) for e in batch)))

    def _evaluate_batch(self, batch: list[Any]) -> list[float]:
        if len(batch) > 1 and self.evaluator.concurrency_safe:
            return asyncio.run(self._evaluate_concurrently(batch))
        return [self._evaluate(e) for e in batch]

    # ------------------------------------------------------------------
    # Bookkeeping
    # ------------------------------------------------------------------

    def _precedents_of(self, anchor: Any) -> list[Any]:
        found = self._precedents.get(anchor)
        if found is None:
            found = [m for m in self.elements if self.space.precedes(m, anchor)]
            self._precedents[anchor] = found
        return found

    def _fold(self, element: Any, accuracy: float) -> bool:
        """Record one evaluation; return whether the frontier changed."""
        record = TrainedRecord(
            code=element,
            latency=self.space.latency(element),
            accuracy=accuracy,
            iteration=len(self.records) + 1,
        )
        self.records.append(record)
        self.trained.add(element)
        if self.elements is not None:
            self._open[self._position[element]] = False

        updated = update_certificates(self.records, self.certificates)
        moved = [a for a, cert in updated.items() if self.certificates.get(a) is not cert]
        self.certificates = updated
        if self.elements is not None:
            for anchor in moved:
                threshold = updated[anchor].threshold
                for m in self._precedents_of(anchor):
                    if m not in self.pruned and self.space.latency(m) >= threshold:
                        self.pruned.add(m)
                        self._open[self._position[m]] = False

        previous = {str(r.code) for r in self.frontier}
        self.frontier = frontier(self.records)
        changed = {str(r.code) for r in self.frontier} != previous

        self.history.append(IterationRecord(
            iteration=record.iteration,
            code=element,
            latency=record.latency,
            accuracy=accuracy,
            trained=len(self.records),
            pruned=len(self.pruned) if self.elements is not None else None,
            frontier_changed=changed,
        ))
        logger.debug(
            "iter %d: %s lat=%.4f acc=%.4f pruned=%s%s",
            record.iteration, element, record.latency, accuracy,
            len(self.pruned) if self.elements is not None else "n/a",
            " frontier changed" if changed else "",
        )
        return changed

    # ------------------------------------------------------------------
    # Main loop
    # ------------------------------------------------------------------

    def run(self) -> SearchResult:
        stagnant = 0
        stop_reason: StopReason
        while True:
            k = self.config.batch_size
            if self.config.max_evaluations is not None:
                k = min(k, self.config.max_evaluations - len(self.records))
            batch = self._select(k)
            if not batch:
                if not self.records:
                    raise EmptySpaceError("no element of the search space could be drawn")
                stop_reason = "exhausted" if self.elements is not None else "sampler_exhausted"
                break
            for element, accuracy in zip(batch, self._evaluate_batch(batch)):
                stagnant = 0 if self._fold(element, accuracy) else stagnant + 1
            if stagnant >= self.config.patience:
                stop_reason = "patience"
                break
            if self.config.max_evaluations is not None and len(self.records) >= self.config.max_evaluations:
                stop_reason = "max_evaluations"
                break

        statistics = self._statistics(stop_reason)
        logger.info(
            "Search stopped (%s): trained %d, pruned %s, frontier %d",
            stop_reason, statistics.trained,
            "n/a" if statistics.pruned is None else statistics.pruned, statistics.frontier_size,
        )
        binned = None
        if self.config.report_bin_ms is not None:
            binned = binned_frontier(self.records, self.config.report_bin_ms)
        return SearchResult(
            frontier=self.frontier,
            binned_frontier=binned,
            records=self.records,
            history=self.history,
            certificates=list(self.certificates.values()),
            statistics=statistics,
        )

    def _statistics(self, stop_reason: StopReason) -> SearchStatistics:
        trained = len(self.records)
        if self.elements is None:
            pruned = skipped = None
            acceleration = None
        else:
            pruned = len(self.pruned)
            skipped = len(self.pruned - self.trained)
            acceleration = (trained + skipped) / trained
        return SearchStatistics(
            trained=trained,
            pruned=pruned,
            skipped=skipped,
            acceleration=acceleration,
            iterations=len(self.history),
            frontier_size=len(self.frontier),
            space_size=None if self.elements is None else len(self.elements),
            stop_reason=stop_reason,
        )


def pop_search(space: SearchSpace, evaluator: Evaluator, config: SearchConfig = SearchConfig()) -> SearchResult:
    return PartialOrderPruning(space, evaluator, config).run()
