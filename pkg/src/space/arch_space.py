"""Backbone architecture encoding.

A backbone is a fixed two-conv stem followed by three residual stages
(stage 3, 4 and 5 of the network) and a pooled FC head. Each stage is a
sequence of block widths; the concatenation of all stages must never
narrow. Canonical text form::

    [(64,64,64),(128,128,128),(256,256,256,512)]
    [(64,64,128),(128x10,256),(256x4,512,512)]@bottleneck

``wxn`` repeats a width on input; output is always fully expanded.
"""

from __future__ import annotations

import itertools
import re
from collections.abc import Iterable, Sequence
from enum import Enum
from functools import lru_cache

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError, model_validator

from src.errors import ArchitectureSyntaxError, InvalidArchitectureError, ResolutionError

DEFAULT_ALPHABET: tuple[int, ...] = (64, 128, 256, 512, 1024)
DEFAULT_STEM: tuple[int, int] = (32, 64)
NUM_STAGES = 3
# Stages (0-based within the searched stages) that use bottleneck blocks
# when the code's kind is bottleneck. Stage 3 keeps basic blocks.
BOTTLENECK_STAGES = frozenset({1, 2})
BOTTLENECK_EXPANSION = 4
IMAGE_CHANNELS = 3
# Input resolution must survive five stride-2 reductions.
RESOLUTION_DIVISOR = 32
# Upper bound on blocks in one parsed stage, repeats included.
MAX_STAGE_BLOCKS = 256


class BlockKind(str, Enum):
    BASIC = "basic"
    BOTTLENECK = "bottleneck"


class LayerKind(str, Enum):
    STEM_CONV = "stem_conv"
    BASIC_BLOCK = "basic_block"
    BOTTLENECK_BLOCK = "bottleneck_block"
    HEAD = "head"
    CHANNEL_CONTROLLER = "channel_controller"
    FUSION_NODE = "fusion_node"


CONVS_PER_BLOCK = {
    LayerKind.BASIC_BLOCK: 2,
    LayerKind.BOTTLENECK_BLOCK: 3,
}


# ---------------------------------------------------------------------------
# Value types
# ---------------------------------------------------------------------------

class BlockConfig(BaseModel):
    """One profiled layer: the latency table is keyed by these."""

    model_config = ConfigDict(frozen=True)

    kind: LayerKind
    c_in: int
    h_in: int
    w_in: int
    c_out: int
    h_out: int
    w_out: int

    @model_validator(mode="after")
    def _check_dimensions(self) -> "BlockConfig":
        dims = (self.c_in, self.h_in, self.w_in, self.c_out, self.h_out, self.w_out)
        if any(d <= 0 for d in dims):
            raise ValueError(f"all dimensions must be positive, got {dims}")
        if self.kind is LayerKind.HEAD:
            return self
        if self.kind is LayerKind.FUSION_NODE:
            allowed = {(self.h_in * 2, self.w_in * 2)}
        else:
            allowed = {(self.h_in, self.w_in), (self.h_in // 2, self.w_in // 2)}
        if (self.h_out, self.w_out) not in allowed:
            raise ValueError(
                f"{self.kind.value}: output {self.h_out}x{self.w_out} "
                f"incompatible with input {self.h_in}x{self.w_in}"
            )
        return self

    @classmethod
    def of(cls, **fields) -> "BlockConfig":
        """Build a config, reporting impossible dimensions as an invalid architecture."""
        try:
            return cls(**fields)
        except ValidationError as e:
            errors = "; ".join(err["msg"] for err in e.errors())
            raise InvalidArchitectureError(f"impossible layer {fields}: {errors}") from None

    def key(self) -> tuple:
        return (self.kind.value, self.c_in, self.h_in, self.w_in, self.c_out, self.h_out, self.w_out)

    def __str__(self) -> str:
        return (
            f"{self.kind.value}({self.c_in},{self.h_in},{self.w_in}"
            f"->{self.c_out},{self.h_out},{self.w_out})"
        )


class ArchitectureCode(BaseModel):
    """A backbone: three stages of non-decreasing widths plus block kind."""

    model_config = ConfigDict(frozen=True)

    stages: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]
    block_kind: BlockKind = BlockKind.BASIC
    stem: tuple[int, int] = DEFAULT_STEM

    @model_validator(mode="after")
    def _check_stages(self) -> "ArchitectureCode":
        check_stages(self.stages)
        return self

    @property
    def widths(self) -> tuple[int, ...]:
        """All block widths, stage after stage."""
        return tuple(itertools.chain.from_iterable(self.stages))

    @property
    def num_blocks(self) -> int:
        return sum(len(s) for s in self.stages)

    def stage_layer_kind(self, stage_index: int) -> LayerKind:
        if self.block_kind is BlockKind.BOTTLENECK and stage_index in BOTTLENECK_STAGES:
            return LayerKind.BOTTLENECK_BLOCK
        return LayerKind.BASIC_BLOCK

    def __str__(self) -> str:
        return format_code(self)


def check_stages(stages: Sequence[Sequence[int]]) -> None:
    """Raise InvalidArchitectureError unless *stages* is a valid stage triple."""
    if len(stages) != NUM_STAGES:
        raise InvalidArchitectureError(f"expected {NUM_STAGES} stages, got {len(stages)}")
    previous = 0
    for index, stage in enumerate(stages):
        if not stage:
            raise InvalidArchitectureError(f"stage {index + 3} is empty")
        for width in stage:
            if width <= 0:
                raise InvalidArchitectureError(f"width must be positive, got {width}")
            if width < previous:
                raise InvalidArchitectureError(
                    f"width {width} in stage {index + 3} is narrower than preceding width {previous}"
                )
            previous = width


def check_alphabet(code: ArchitectureCode, alphabet: Iterable[int]) -> None:
    allowed = set(alphabet)
    for width in code.widths:
        if width not in allowed:
            raise InvalidArchitectureError(f"width {width} not in alphabet {sorted(allowed)}")


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------

_CODE_RE = re.compile(r"^\[\(([^()]*)\),\(([^()]*)\),\(([^()]*)\)\](?:@(\w+))?$")
_WIDTH_RE = re.compile(r"^(\d+)(?:[x×\*](\d+))?$")


def _parse_stage(text: str) -> tuple[int, ...]:
    if not text:
        return ()
    widths: list[int] = []
    for token in text.split(","):
        match = _WIDTH_RE.match(token)
        if match is None:
            raise ArchitectureSyntaxError(f"bad width token {token!r}")
        repeat = int(match.group(2)) if match.group(2) else 1
        if repeat < 1:
            raise ArchitectureSyntaxError(f"bad repeat count in {token!r}")
        if len(widths) + repeat > MAX_STAGE_BLOCKS:
            raise ArchitectureSyntaxError(f"stage longer than {MAX_STAGE_BLOCKS} blocks at {token!r}")
        widths.extend([int(match.group(1))] * repeat)
    return tuple(widths)


def parse_code(
    text: str,
    alphabet: Iterable[int] = DEFAULT_ALPHABET,
    stem: tuple[int, int] = DEFAULT_STEM,
) -> ArchitectureCode:
    """Parse canonical architecture text and validate it against *alphabet*."""
    compact = re.sub(r"\s+", "", text)
    match = _CODE_RE.match(compact)
    if match is None:
        raise ArchitectureSyntaxError(f"not an architecture code: {text!r}")
    stages = tuple(_parse_stage(match.group(i)) for i in (1, 2, 3))
    kind_text = match.group(4) or BlockKind.BASIC.value
    try:
        kind = BlockKind(kind_text)
    except ValueError:
        raise ArchitectureSyntaxError(f"unknown block kind {kind_text!r}") from None
    check_stages(stages)
    code = ArchitectureCode.model_construct(stages=stages, block_kind=kind, stem=tuple(stem))
    check_alphabet(code, alphabet)
    return code


def format_code(code: ArchitectureCode) -> str:
    body = ",".join("(" + ",".join(str(w) for w in stage) + ")" for stage in code.stages)
    suffix = "" if code.block_kind is BlockKind.BASIC else f"@{code.block_kind.value}"
    return f"[{body}]{suffix}"


# ---------------------------------------------------------------------------
# Derived quantities
# ---------------------------------------------------------------------------

def depth(code: ArchitectureCode) -> int:
    """Weighted layer count: stem convs + block convs + FC."""
    convs = sum(
        CONVS_PER_BLOCK[code.stage_layer_kind(i)] * len(stage)
        for i, stage in enumerate(code.stages)
    )
    return len(code.stem) + convs + 1


def check_resolution(resolution: int) -> None:
    if resolution <= 0 or resolution % RESOLUTION_DIVISOR:
        raise ResolutionError(
            f"input resolution {resolution} must be a positive multiple of {RESOLUTION_DIVISOR}"
        )


def stage_input_resolution(resolution: int, stage_index: int) -> int:
    """Spatial size entering the first block of a searched stage."""
    return resolution // (4 * 2**stage_index)


@lru_cache(maxsize=None)
def stem_configs(resolution: int, stem: tuple[int, int] = DEFAULT_STEM) -> tuple[BlockConfig, BlockConfig]:
    half, quarter = resolution // 2, resolution // 4
    return (
        BlockConfig.of(kind=LayerKind.STEM_CONV, c_in=IMAGE_CHANNELS, h_in=resolution, w_in=resolution,
                    c_out=stem[0], h_out=half, w_out=half),
        BlockConfig.of(kind=LayerKind.STEM_CONV, c_in=stem[0], h_in=half, w_in=half,
                    c_out=stem[1], h_out=quarter, w_out=quarter),
    )


@lru_cache(maxsize=None)
def stage_block(layer_kind: LayerKind, c_in: int, width: int, resolution_in: int, first: bool) -> BlockConfig:
    """Config of one residual block. The first block of a stage downsamples."""
    c_out = width * BOTTLENECK_EXPANSION if layer_kind is LayerKind.BOTTLENECK_BLOCK else width
    res_out = resolution_in // 2 if first else resolution_in
    return BlockConfig.of(kind=layer_kind, c_in=c_in, h_in=resolution_in, w_in=resolution_in,
                       c_out=c_out, h_out=res_out, w_out=res_out)


@lru_cache(maxsize=None)
def head_config(c_in: int, resolution_in: int, num_classes: int) -> BlockConfig:
    return BlockConfig.of(kind=LayerKind.HEAD, c_in=c_in, h_in=resolution_in, w_in=resolution_in,
                       c_out=num_classes, h_out=1, w_out=1)


def block_configs(code: ArchitectureCode, input_resolution: int, num_classes: int) -> list[BlockConfig]:
    """Every profiled layer of *code* in execution order (stems, blocks, head)."""
    check_resolution(input_resolution)
    configs = list(stem_configs(input_resolution, tuple(code.stem)))
    c_in = code.stem[1]
    for index, stage in enumerate(code.stages):
        layer_kind = code.stage_layer_kind(index)
        resolution = stage_input_resolution(input_resolution, index)
        for position, width in enumerate(stage):
            config = stage_block(layer_kind, c_in, width, resolution, position == 0)
            configs.append(config)
            c_in, resolution = config.c_out, config.h_out
    configs.append(head_config(c_in, input_resolution // RESOLUTION_DIVISOR, num_classes))
    return configs


# ---------------------------------------------------------------------------
# Enumeration and sampling
# ---------------------------------------------------------------------------

def enumerate_codes(
    alphabet: Iterable[int] = DEFAULT_ALPHABET,
    kind: BlockKind = BlockKind.BASIC,
    max_blocks_per_stage: int = 2,
    stem: tuple[int, int] = DEFAULT_STEM,
) -> list[ArchitectureCode]:
    """All valid codes with at most *max_blocks_per_stage* blocks per stage."""
    widths = sorted(set(alphabet))
    codes: list[ArchitectureCode] = []
    for lengths in itertools.product(range(1, max_blocks_per_stage + 1), repeat=NUM_STAGES):
        l3, l4, _ = lengths
        for seq in itertools.combinations_with_replacement(widths, sum(lengths)):
            stages = (seq[:l3], seq[l3:l3 + l4], seq[l3 + l4:])
            codes.append(ArchitectureCode.model_construct(stages=stages, block_kind=kind, stem=tuple(stem)))
    return codes


def random_code(
    rng: np.random.Generator,
    alphabet: Iterable[int] = DEFAULT_ALPHABET,
    kind: BlockKind = BlockKind.BASIC,
    max_blocks_per_stage: int = 4,
    stem: tuple[int, int] = DEFAULT_STEM,
) -> ArchitectureCode:
    widths = np.array(sorted(set(alphabet)))
    lengths = rng.integers(1, max_blocks_per_stage + 1, size=NUM_STAGES)
    seq = tuple(int(w) for w in np.sort(rng.choice(widths, size=int(lengths.sum()))))
    l3, l4 = int(lengths[0]), int(lengths[1])
    stages = (seq[:l3], seq[l3:l3 + l4], seq[l3 + l4:])
    return ArchitectureCode.model_construct(stages=stages, block_kind=kind, stem=tuple(stem))


REFERENCE_CODES: dict[str, ArchitectureCode] = {
    "small": parse_code("[(64,64,64),(128,128,128),(256,256,256,512)]"),
    "medium": parse_code("[(64,64,128),(128x10,256),(256x4,512,512)]"),
    "medium-bottleneck": parse_code("[(64,64,128),(128x10,256),(256x4,512,512)]@bottleneck"),
}
