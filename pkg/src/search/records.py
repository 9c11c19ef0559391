"""Trained-record, history and statistics files.

Records: ``code,latency_ms,accuracy``. History:
``iteration,code,latency_ms,accuracy,trained,pruned,frontier_changed``.
Floats are written with ``repr`` so files read back exactly.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections.abc import Callable, Iterable
from pathlib import Path
from typing import Any, TextIO

from pydantic import BaseModel, ConfigDict, Field

from src.errors import DataError, RecordsFileError
from src.space.elements import parse_element

RECORDS_HEADER = ("code", "latency_ms", "accuracy")
HISTORY_HEADER = ("iteration", "code", "latency_ms", "accuracy", "trained", "pruned", "frontier_changed")
NOT_MATERIALIZED = "n/a"


class TrainedRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    code: Any
    latency: float = Field(gt=0)
    accuracy: float = Field(ge=0, le=1)
    iteration: int = 0


class IterationRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    iteration: int
    code: Any
    latency: float
    accuracy: float
    trained: int
    # None when the space is not materialized
    pruned: int | None
    frontier_changed: bool


def parse_accuracy(text: str) -> float:
    """Fraction in [0, 1]; a ``%`` suffix divides by 100."""
    text = text.strip()
    value = float(text[:-1]) / 100.0 if text.endswith("%") else float(text)
    if not (0.0 <= value <= 1.0) or math.isnan(value):
        raise ValueError(f"accuracy {text!r} outside [0, 1]")
    return value


def _rows(text: str) -> Iterable[tuple[int, list[str]]]:
    lines = [(n, line) for n, line in enumerate(text.splitlines(), start=1)
             if line.strip() and not line.lstrip().startswith("#")]
    reader = csv.reader(line for _, line in lines)
    for (line_no, _), row in zip(lines, reader):
        yield line_no, row


def parse_records(
    text: str,
    parse: Callable[[str], Any] = parse_element,
    require_accuracy: bool = True,
) -> list[TrainedRecord]:
    records: list[TrainedRecord] = []
    for line_no, row in _rows(text):
        if not records and tuple(f.strip() for f in row[:2]) == RECORDS_HEADER[:2]:
            continue
        if len(row) not in (2, 3):
            raise RecordsFileError(f"line {line_no}: expected code,latency_ms,accuracy")
        try:
            code = parse(row[0])
            latency = float(row[1])
            has_accuracy = len(row) == 3 and row[2].strip() != ""
            if require_accuracy and not has_accuracy:
                raise ValueError("missing accuracy")
            accuracy = parse_accuracy(row[2]) if has_accuracy else 0.0
            records.append(TrainedRecord(code=code, latency=latency, accuracy=accuracy, iteration=len(records)))
        except DataError as e:
            raise RecordsFileError(f"line {line_no}: {e}") from None
        except ValueError as e:
            raise RecordsFileError(f"line {line_no}: {e}") from None
    return records


def load_records(
    path: str | Path,
    parse: Callable[[str], Any] = parse_element,
    require_accuracy: bool = True,
) -> list[TrainedRecord]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise RecordsFileError(f"cannot read records file {path}: {e}") from None
    return parse_records(text, parse, require_accuracy)


def load_latencies(path: str | Path, parse: Callable[[str], Any] = parse_element) -> dict[Any, float]:
    """Per-code latency file: a records file whose accuracy column is ignored."""
    latencies: dict[Any, float] = {}
    for record in load_records(path, parse, require_accuracy=False):
        if record.code in latencies:
            raise RecordsFileError(f"duplicate latency for {record.code}")
        latencies[record.code] = record.latency
    return latencies


# ---------------------------------------------------------------------------
# Writers
# ---------------------------------------------------------------------------

def write_records(records: Iterable[TrainedRecord], out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(RECORDS_HEADER)
    for r in records:
        writer.writerow([str(r.code), repr(r.latency), repr(r.accuracy)])


def format_records(records: Iterable[TrainedRecord]) -> str:
    buf = io.StringIO()
    write_records(records, buf)
    return buf.getvalue()


def write_history(history: Iterable[IterationRecord], out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(HISTORY_HEADER)
    for h in history:
        writer.writerow([
            h.iteration,
            str(h.code),
            repr(h.latency),
            repr(h.accuracy),
            h.trained,
            NOT_MATERIALIZED if h.pruned is None else h.pruned,
            "true" if h.frontier_changed else "false",
        ])


def write_json(payload: BaseModel, out: TextIO) -> None:
    json.dump(payload.model_dump(mode="json"), out, indent=2)
    out.write("\n")


def write_file(path: Path, writer: Callable[[TextIO], None]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer(f)
