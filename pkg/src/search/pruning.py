"""Prune certificates.

A certificate ``(anchor, threshold)`` stands for every precedent of the
anchor whose latency is at least the threshold: the latency of the
fastest trained record (the witness) no less accurate than the anchor.
Such precedents cannot beat the witness as long as accuracy and latency
both grow along the precedence order, so they are never trained. The
pruned set is the union of these order ideals and is only ever tested,
not built.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from typing import TYPE_CHECKING, Any

from pydantic import BaseModel, ConfigDict, model_validator

from src.search.frontier import best_faster_for_all
from src.search.records import TrainedRecord

if TYPE_CHECKING:
    from src.search.spaces import SearchSpace


class PruneCertificate(BaseModel):
    model_config = ConfigDict(frozen=True)

    anchor: Any
    anchor_latency: float
    threshold: float
    # Fastest trained code at least as accurate as the anchor
    witness: Any = None

    @model_validator(mode="after")
    def _check_threshold(self) -> "PruneCertificate":
        if self.threshold > self.anchor_latency:
            raise ValueError(f"threshold {self.threshold} above anchor latency {self.anchor_latency}")
        return self


def _values(certificates: Mapping[Any, PruneCertificate] | Iterable[PruneCertificate]) -> Iterable[PruneCertificate]:
    return certificates.values() if isinstance(certificates, Mapping) else certificates


def is_pruned(
    m: Any,
    certificates: Mapping[Any, PruneCertificate] | Iterable[PruneCertificate],
    space: "SearchSpace",
) -> bool:
    latency = None
    for cert in _values(certificates):
        if not space.precedes(m, cert.anchor):
            continue
        if latency is None:
            latency = space.latency(m)
        if latency >= cert.threshold:
            return True
    return False


def update_certificates(
    records: Iterable[TrainedRecord],
    certificates: Mapping[Any, PruneCertificate] | None = None,
) -> dict[Any, PruneCertificate]:
    """One certificate per trained record, thresholds recomputed from *records*.

    An anchor whose threshold is unchanged keeps its previous certificate
    object, so callers can spot the anchors that moved by identity.
    """
    records = list(records)
    previous = certificates or {}
    best = best_faster_for_all(records)
    updated: dict[Any, PruneCertificate] = {}
    for w in records:
        y = best[w.code]
        old = previous.get(w.code)
        if old is not None and old.threshold <= y.latency:
            updated[w.code] = old
            continue
        updated[w.code] = PruneCertificate(
            anchor=w.code, anchor_latency=w.latency, threshold=y.latency, witness=y.code,
        )
    return updated
