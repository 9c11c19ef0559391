"""Decoder channel-controller (CC) codes.

A segmentation decoder is configured by the widths of the 1x1 channel
controllers after stages 3, 4 and 5. Codes are written ``K:[C3,C4,C5]``
where K is the number of classes, e.g. ``19:[19,32,128]``.
"""

from __future__ import annotations

import itertools
import re

from pydantic import BaseModel, ConfigDict, model_validator

from src.errors import ArchitectureSyntaxError, InvalidArchitectureError
from src.space.arch_space import (
    ArchitectureCode,
    BlockConfig,
    LayerKind,
    block_configs,
    stage_input_resolution,
)

CC_WIDTHS: tuple[int, ...] = (32, 64, 128, 256, 512)


def decoder_alphabet(num_classes: int) -> tuple[int, ...]:
    return tuple(sorted({num_classes, *CC_WIDTHS}))


class DecoderCode(BaseModel):
    model_config = ConfigDict(frozen=True)

    num_classes: int
    cc: tuple[int, int, int]

    @model_validator(mode="after")
    def _check_widths(self) -> "DecoderCode":
        if self.num_classes < 1:
            raise ValueError(f"num_classes must be >= 1, got {self.num_classes}")
        allowed = decoder_alphabet(self.num_classes)
        for width in self.cc:
            if width not in allowed:
                raise ValueError(f"CC width {width} not in {list(allowed)}")
        return self

    def __str__(self) -> str:
        return format_decoder_code(self)


_DECODER_RE = re.compile(r"^(\d+):\[(\d+),(\d+),(\d+)\]$")


def parse_decoder_code(text: str) -> DecoderCode:
    match = _DECODER_RE.match(re.sub(r"\s+", "", text))
    if match is None:
        raise ArchitectureSyntaxError(f"not a decoder code: {text!r}")
    num_classes, *cc = (int(g) for g in match.groups())
    if num_classes < 1:
        raise InvalidArchitectureError(f"num_classes must be >= 1, got {num_classes}")
    allowed = decoder_alphabet(num_classes)
    for width in cc:
        if width not in allowed:
            raise InvalidArchitectureError(f"CC width {width} not in {list(allowed)}")
    return DecoderCode.model_construct(num_classes=num_classes, cc=tuple(cc))


def format_decoder_code(code: DecoderCode) -> str:
    return f"{code.num_classes}:[{','.join(str(c) for c in code.cc)}]"


def decoder_precedes(x: DecoderCode, y: DecoderCode) -> bool:
    """Strict elementwise order on CC widths; different K never compares."""
    if x.num_classes != y.num_classes or x.cc == y.cc:
        return False
    return all(a <= b for a, b in zip(x.cc, y.cc))


def enumerate_decoder_space(num_classes: int) -> list[DecoderCode]:
    if num_classes < 1:
        raise InvalidArchitectureError(f"num_classes must be >= 1, got {num_classes}")
    alphabet = decoder_alphabet(num_classes)
    return [
        DecoderCode.model_construct(num_classes=num_classes, cc=cc)
        for cc in itertools.product(alphabet, repeat=3)
    ]


def decoder_configs(code: DecoderCode, backbone: ArchitectureCode, resolution: int) -> list[BlockConfig]:
    """Layers priced for a decoder on top of *backbone*: three CCs and two fusion nodes."""
    backbone_layers = block_configs(backbone, resolution, code.num_classes)
    stage_outputs: list[BlockConfig] = []
    end = 2
    for stage in backbone.stages:
        end += len(stage)
        stage_outputs.append(backbone_layers[end - 1])

    configs = [
        BlockConfig.of(kind=LayerKind.CHANNEL_CONTROLLER, c_in=out.c_out, h_in=out.h_out, w_in=out.w_out,
                    c_out=width, h_out=out.h_out, w_out=out.w_out)
        for out, width in zip(stage_outputs, code.cc)
    ]
    # Fuse stage 5 into 4, then 4 into 3; each node upsamples by two.
    for low, high in ((2, 1), (1, 0)):
        size = stage_input_resolution(resolution, low) // 2
        configs.append(BlockConfig.of(kind=LayerKind.FUSION_NODE, c_in=code.cc[low], h_in=size, w_in=size,
                                   c_out=code.cc[high], h_out=size * 2, w_out=size * 2))
    return configs
