"""Profiled latency look-up tables.

Table files are UTF-8 CSV with header
``kind,c_in,h_in,w_in,c_out,h_out,w_out,latency_ms``. Lines starting with
``#`` are comments; ``# key: value`` comments before the header are read as
metadata (``platform``, ``resolution``, ``tool``).
"""

from __future__ import annotations

import csv
import io
import logging
import math
import re
from collections import defaultdict
from collections.abc import Iterable
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.errors import LatencyTableError, MissingLatencyError
from src.space.arch_space import ArchitectureCode, BlockConfig, LayerKind, block_configs

logger = logging.getLogger("popnas")

TABLE_HEADER = ("kind", "c_in", "h_in", "w_in", "c_out", "h_out", "w_out", "latency_ms")
_META_RE = re.compile(r"^#\s*(\w+)\s*:\s*(.*?)\s*$")


class LatencyTable(BaseModel):
    model_config = ConfigDict(frozen=True)

    entries: dict[BlockConfig, float]
    platform: str = "unknown"
    resolution: int | None = None
    tool: str | None = None

    @model_validator(mode="after")
    def _check_entries(self) -> "LatencyTable":
        for config, latency in self.entries.items():
            if not (latency > 0 and math.isfinite(latency)):
                raise ValueError(f"latency for {config} must be positive and finite, got {latency}")
        return self

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, config: BlockConfig) -> bool:
        return config in self.entries

    def lookup(self, config: BlockConfig) -> float:
        try:
            return self.entries[config]
        except KeyError:
            raise MissingLatencyError(config) from None


class LatencyBand(BaseModel):
    """Closed latency interval in milliseconds; ``t_max`` may be infinite."""

    model_config = ConfigDict(frozen=True)

    t_min: float = Field(ge=0.0)
    t_max: float

    @model_validator(mode="after")
    def _check_order(self) -> "LatencyBand":
        if self.t_max < self.t_min:
            raise ValueError(f"t_max {self.t_max} is below t_min {self.t_min}")
        return self

    def __contains__(self, latency: float) -> bool:
        return self.t_min <= latency <= self.t_max


def parse_band(text: str) -> LatencyBand:
    """Parse ``lo,hi``; ``hi`` may be ``inf``."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise ValueError(f"band must be 'lo,hi', got {text!r}")
    return LatencyBand(t_min=float(parts[0]), t_max=float(parts[1]))


# ---------------------------------------------------------------------------
# File IO
# ---------------------------------------------------------------------------

def _parse_row(row: list[str], line_no: int) -> tuple[BlockConfig, float]:
    if len(row) != len(TABLE_HEADER):
        raise LatencyTableError(f"line {line_no}: expected {len(TABLE_HEADER)} fields, got {len(row)}")
    kind_text, *dims_text, latency_text = (field.strip() for field in row)
    try:
        kind = LayerKind(kind_text)
    except ValueError:
        raise LatencyTableError(f"line {line_no}: unknown layer kind {kind_text!r}") from None
    try:
        dims = [int(d) for d in dims_text]
        latency = float(latency_text)
    except ValueError:
        raise LatencyTableError(f"line {line_no}: non-numeric field in {row}") from None
    if not (latency > 0 and math.isfinite(latency)):
        raise LatencyTableError(f"line {line_no}: latency must be positive, got {latency_text}")
    c_in, h_in, w_in, c_out, h_out, w_out = dims
    try:
        config = BlockConfig(kind=kind, c_in=c_in, h_in=h_in, w_in=w_in, c_out=c_out, h_out=h_out, w_out=w_out)
    except ValueError as e:
        raise LatencyTableError(f"line {line_no}: {e}") from None
    return config, latency


def parse_table(text: str) -> LatencyTable:
    entries: dict[BlockConfig, float] = {}
    metadata: dict[str, str] = {}
    seen_header = False
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            match = _META_RE.match(stripped)
            if match and match.group(1) in ("platform", "resolution", "tool"):
                metadata[match.group(1)] = match.group(2)
            continue
        row = next(csv.reader([stripped]))
        if not seen_header and tuple(f.strip() for f in row) == TABLE_HEADER:
            seen_header = True
            continue
        seen_header = True
        config, latency = _parse_row(row, line_no)
        if config in entries:
            raise LatencyTableError(f"line {line_no}: duplicate entry for {config}")
        entries[config] = latency
    if not entries:
        raise LatencyTableError("latency table has no entries")
    resolution = metadata.get("resolution")
    return LatencyTable.model_construct(
        entries=entries,
        platform=metadata.get("platform", "unknown"),
        resolution=int(resolution) if resolution and resolution.isdigit() else None,
        tool=metadata.get("tool"),
    )


def load_table(path: str | Path) -> LatencyTable:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise LatencyTableError(f"cannot read latency table {path}: {e}") from None
    table = parse_table(text)
    logger.info("Loaded latency table %s: %d entries, platform=%s", path, len(table), table.platform)
    return table


def format_table(table: LatencyTable) -> str:
    buf = io.StringIO()
    buf.write(f"# platform: {table.platform}\n")
    if table.resolution is not None:
        buf.write(f"# resolution: {table.resolution}\n")
    if table.tool:
        buf.write(f"# tool: {table.tool}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TABLE_HEADER)
    for config in sorted(table.entries, key=BlockConfig.key):
        writer.writerow([*config.key(), repr(table.entries[config])])
    return buf.getvalue()


def write_table(table: LatencyTable, path: str | Path) -> None:
    Path(path).write_text(format_table(table), encoding="utf-8")


# ---------------------------------------------------------------------------
# Estimation and auditing
# ---------------------------------------------------------------------------

def sum_latency(configs: Iterable[BlockConfig], table: LatencyTable) -> float:
    total = 0.0
    for config in configs:
        total += table.lookup(config)
    return total


def estimate_latency(code: ArchitectureCode, table: LatencyTable, resolution: int = 224, classes: int = 1000) -> float:
    """Network latency as the sum of its layers' table entries."""
    return sum_latency(block_configs(code, resolution, classes), table)


class MonotonicityViolation(BaseModel):
    model_config = ConfigDict(frozen=True)

    smaller: BlockConfig
    larger: BlockConfig
    smaller_ms: float
    larger_ms: float


class AuditReport(BaseModel):
    violations: list[MonotonicityViolation]
    pairs_checked: int

    @property
    def count(self) -> int:
        return len(self.violations)


def audit_monotonicity(table: LatencyTable) -> AuditReport:
    """Find entries that get faster when only their channel counts grow."""
    groups: dict[tuple, list[BlockConfig]] = defaultdict(list)
    for config in table.entries:
        groups[(config.kind, config.h_in, config.w_in, config.h_out, config.w_out)].append(config)

    violations: list[MonotonicityViolation] = []
    pairs = 0
    for group_key in sorted(groups, key=lambda k: (k[0].value, *k[1:])):
        members = sorted(groups[group_key], key=BlockConfig.key)
        for a in members:
            for b in members:
                if a is b or b.c_in < a.c_in or b.c_out < a.c_out:
                    continue
                pairs += 1
                if table.entries[b] < table.entries[a]:
                    violations.append(MonotonicityViolation(
                        smaller=a, larger=b, smaller_ms=table.entries[a], larger_ms=table.entries[b],
                    ))
    if violations:
        logger.warning("Latency table has %d monotonicity violations", len(violations))
    return AuditReport(violations=violations, pairs_checked=pairs)
