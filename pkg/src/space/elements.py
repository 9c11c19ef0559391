"""Helpers that work on either kind of search element (backbone or decoder code)."""

from __future__ import annotations

import re
from collections.abc import Iterable
from typing import Any

from src.space.arch_space import DEFAULT_ALPHABET, DEFAULT_STEM, ArchitectureCode, parse_code
from src.space.decoder_space import DecoderCode, decoder_precedes, parse_decoder_code
from src.space.partial_order import precedes

_DECODER_PREFIX = re.compile(r"^\s*\d+\s*:")


def parse_element(
    text: str,
    alphabet: Iterable[int] = DEFAULT_ALPHABET,
    stem: tuple[int, int] = DEFAULT_STEM,
) -> ArchitectureCode | DecoderCode:
    if _DECODER_PREFIX.match(text):
        return parse_decoder_code(text)
    return parse_code(text, alphabet, stem)


def element_precedes(x: Any, y: Any) -> bool:
    if isinstance(x, ArchitectureCode) and isinstance(y, ArchitectureCode):
        return precedes(x, y)
    if isinstance(x, DecoderCode) and isinstance(y, DecoderCode):
        return decoder_precedes(x, y)
    return False
