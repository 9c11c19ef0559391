from src.space.arch_space import (
    ArchitectureCode,
    BlockConfig,
    BlockKind,
    block_configs,
    depth,
    format_code,
    parse_code,
)
from src.space.decoder_space import DecoderCode, decoder_precedes, enumerate_decoder_space
from src.space.partial_order import count_precedents, elementary_shrinks, precedes

__all__ = [
    "ArchitectureCode",
    "BlockConfig",
    "BlockKind",
    "DecoderCode",
    "block_configs",
    "count_precedents",
    "decoder_precedes",
    "depth",
    "elementary_shrinks",
    "enumerate_decoder_space",
    "format_code",
    "parse_code",
    "precedes",
]
