"""Replay accuracies recorded in a records file."""

from __future__ import annotations

from collections.abc import Callable, Mapping
from pathlib import Path
from typing import Any

from src.errors import MissingRecordError, RecordsFileError
from src.evaluators.base import Evaluator
from src.search.records import load_records
from src.space.elements import parse_element


def load_replay(path: str | Path, parse: Callable[[str], Any] = parse_element) -> dict[str, float]:
    """Accuracy per canonical code text; duplicate codes are rejected."""
    replay: dict[str, float] = {}
    for record in load_records(path, parse):
        key = str(record.code)
        if key in replay:
            raise RecordsFileError(f"{path}: duplicate record for {key}")
        replay[key] = record.accuracy
    return replay


def replay_accuracy(code: Any, replay: Mapping[str, float]) -> float:
    try:
        return replay[str(code)]
    except KeyError:
        raise MissingRecordError(str(code)) from None


class ReplayEvaluator(Evaluator):
    concurrency_safe = True

    def __init__(self, replay: Mapping[str, float]) -> None:
        self.replay = dict(replay)

    @classmethod
    def from_file(cls, path: str | Path, parse: Callable[[str], Any] = parse_element) -> "ReplayEvaluator":
        return cls(load_replay(path, parse))

    def evaluate(self, element: Any) -> float:
        return replay_accuracy(element, self.replay)
