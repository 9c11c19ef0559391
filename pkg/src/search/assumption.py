"""Empirical check of the partial order assumption on trained records.

For every comparable pair ``x ≺ y`` the assumption expects both
``Lat(y) - Lat(x)`` and ``Acc(y) - Acc(x)`` to be non-negative.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable
from typing import Any

from pydantic import BaseModel, ConfigDict

from src.search.records import TrainedRecord
from src.space.elements import element_precedes


class PairDelta(BaseModel):
    model_config = ConfigDict(frozen=True)

    lower: Any
    upper: Any
    delta_latency: float
    delta_accuracy: float


class AssumptionSummary(BaseModel):
    pair_count: int
    negative_accuracy_fraction: float
    negative_latency_fraction: float
    min_delta_accuracy: float | None
    min_delta_latency: float | None


class AssumptionReport(BaseModel):
    pairs: list[PairDelta]
    summary: AssumptionSummary


def check_assumption(
    records: Iterable[TrainedRecord],
    precedes: Callable[[Any, Any], bool] = element_precedes,
) -> AssumptionReport:
    records = list(records)
    pairs = [
        PairDelta(
            lower=x.code,
            upper=y.code,
            delta_latency=y.latency - x.latency,
            delta_accuracy=y.accuracy - x.accuracy,
        )
        for x in records
        for y in records
        if precedes(x.code, y.code)
    ]
    n = len(pairs)
    summary = AssumptionSummary(
        pair_count=n,
        negative_accuracy_fraction=sum(p.delta_accuracy < 0 for p in pairs) / n if n else 0.0,
        negative_latency_fraction=sum(p.delta_latency < 0 for p in pairs) / n if n else 0.0,
        min_delta_accuracy=min((p.delta_accuracy for p in pairs), default=None),
        min_delta_latency=min((p.delta_latency for p in pairs), default=None),
    )
    return AssumptionReport(pairs=pairs, summary=summary)
