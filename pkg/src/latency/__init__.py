from src.latency.subspace import enumerate_subspace
from src.latency.table import (
    LatencyBand,
    LatencyTable,
    audit_monotonicity,
    estimate_latency,
    load_table,
)

__all__ = [
    "LatencyBand",
    "LatencyTable",
    "audit_monotonicity",
    "enumerate_subspace",
    "estimate_latency",
    "load_table",
]
