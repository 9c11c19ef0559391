"""Shared pytest configuration and fixtures.

Loads .env before collection so ``POP_*`` settings apply to tests that
build ``Settings()``, and provides small synthetic latency tables.
"""

import pytest
from dotenv import load_dotenv

from src.latency.synthetic import backbone_universe, synthetic_table
from src.latency.table import LatencyTable
from src.space.arch_space import BlockKind

load_dotenv()

# Small networks keep the tables and spaces tiny.
RESOLUTION = 64
CLASSES = 10
SMALL_ALPHABET = (64, 128, 256)


def make_table(
    alphabet=SMALL_ALPHABET,
    kind: BlockKind = BlockKind.BASIC,
    resolution: int = RESOLUTION,
    classes: int = CLASSES,
    seed: int = 0,
) -> LatencyTable:
    """Monotone synthetic table covering every code over *alphabet*."""
    return synthetic_table(backbone_universe(alphabet, kind, resolution, classes), seed=seed, resolution=resolution)


@pytest.fixture
def small_table() -> LatencyTable:
    return make_table()


@pytest.fixture
def bottleneck_table() -> LatencyTable:
    return make_table(kind=BlockKind.BOTTLENECK)
