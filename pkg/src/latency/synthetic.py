"""Desk-scale latency tables priced from multiply-accumulate counts.

Stands in for device profiles: latency grows strictly with channel
counts, so ``audit_monotonicity`` finds nothing, and a tiny per-key
jitter keeps distinct architectures from tying on total latency.
"""

from __future__ import annotations

import hashlib
from collections.abc import Iterable

from src.latency.table import LatencyTable
from src.space.arch_space import (
    BOTTLENECK_EXPANSION,
    DEFAULT_ALPHABET,
    DEFAULT_STEM,
    NUM_STAGES,
    RESOLUTION_DIVISOR,
    ArchitectureCode,
    BlockConfig,
    BlockKind,
    LayerKind,
    check_resolution,
    head_config,
    stage_block,
    stage_input_resolution,
    stem_configs,
)
from src.space.decoder_space import decoder_configs, enumerate_decoder_space

MS_PER_GMAC = 1.0
OVERHEAD_MS = 0.01
JITTER = 1e-4


def macs(config: BlockConfig) -> int:
    out_area = config.h_out * config.w_out
    c_in, c_out = config.c_in, config.c_out
    match config.kind:
        case LayerKind.STEM_CONV:
            return 9 * c_in * c_out * out_area
        case LayerKind.BASIC_BLOCK:
            return 9 * (c_in * c_out + c_out * c_out) * out_area
        case LayerKind.BOTTLENECK_BLOCK:
            mid = max(1, c_out // BOTTLENECK_EXPANSION)
            return (c_in * mid + 9 * mid * mid + mid * c_out) * out_area
        case LayerKind.HEAD:
            return c_in * c_out + c_in * config.h_in * config.w_in
        case LayerKind.CHANNEL_CONTROLLER:
            return c_in * c_out * out_area
        case LayerKind.FUSION_NODE:
            return c_in * c_out * config.h_in * config.w_in + 9 * 2 * c_out * c_out * out_area
    raise ValueError(f"unknown layer kind {config.kind}")


def _jitter(config: BlockConfig, seed: int) -> float:
    digest = hashlib.blake2b(f"{seed}:{config.key()}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big") / 2**64


def price(config: BlockConfig, seed: int = 0, jitter: float = JITTER) -> float:
    # Jitter scales the compute term only; it must stay below the smallest
    # relative MAC step between comparable configs.
    compute = macs(config) * MS_PER_GMAC / 1e9
    return compute * (1.0 + jitter * _jitter(config, seed)) + OVERHEAD_MS


def backbone_universe(
    alphabet: Iterable[int] = DEFAULT_ALPHABET,
    kind: BlockKind = BlockKind.BASIC,
    resolution: int = 224,
    classes: int = 1000,
    stem: tuple[int, int] = DEFAULT_STEM,
) -> list[BlockConfig]:
    """Every config any code over *alphabet* can need."""
    check_resolution(resolution)
    widths = sorted(set(alphabet))
    probe = ArchitectureCode.model_construct(stages=((1,), (1,), (1,)), block_kind=kind, stem=tuple(stem))
    configs: list[BlockConfig] = list(stem_configs(resolution, tuple(stem)))
    inputs = {stem[1]}
    for s in range(NUM_STAGES):
        layer_kind = probe.stage_layer_kind(s)
        res = stage_input_resolution(resolution, s)
        outputs: set[int] = set()
        for c_in in sorted(inputs):
            for w in widths:
                first = stage_block(layer_kind, c_in, w, res, True)
                configs.append(first)
                outputs.add(first.c_out)
        for c_in in sorted(outputs):
            for w in widths:
                configs.append(stage_block(layer_kind, c_in, w, res // 2, False))
        # A later stage's first block may follow any block of this one.
        inputs = outputs
    configs.extend(head_config(c, resolution // RESOLUTION_DIVISOR, classes) for c in sorted(inputs))
    return configs


def decoder_universe(backbone: ArchitectureCode, num_classes: int, resolution: int) -> list[BlockConfig]:
    seen: dict[BlockConfig, None] = {}
    for code in enumerate_decoder_space(num_classes):
        for config in decoder_configs(code, backbone, resolution):
            seen.setdefault(config, None)
    return list(seen)


def synthetic_table(
    configs: Iterable[BlockConfig],
    seed: int = 0,
    jitter: float = JITTER,
    platform: str = "synthetic",
    resolution: int | None = None,
) -> LatencyTable:
    entries = {config: price(config, seed, jitter) for config in configs}
    return LatencyTable.model_construct(entries=entries, platform=platform, resolution=resolution, tool="macs")

