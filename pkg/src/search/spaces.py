"""Search spaces the engine can run over.

A space answers four questions about its elements: is it a member, how
fast is it, does one precede another, and (when it can) what are all
its members. Backbone and decoder spaces, plus a fixed-list space for
replayed data and tests, implement the same contract.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Callable, Iterable, Mapping
from typing import Any

import numpy as np

from src.errors import DataError
from src.latency.subspace import enumerate_subspace
from src.latency.table import LatencyBand, LatencyTable, estimate_latency, sum_latency
from src.space.arch_space import (
    DEFAULT_ALPHABET,
    DEFAULT_STEM,
    ArchitectureCode,
    BlockKind,
    parse_code,
    random_code,
)
from src.space.decoder_space import (
    DecoderCode,
    decoder_alphabet,
    decoder_configs,
    decoder_precedes,
    enumerate_decoder_space,
    parse_decoder_code,
)
from src.space.elements import element_precedes, parse_element
from src.space.partial_order import precedes

UNBOUNDED = LatencyBand(t_min=0.0, t_max=float("inf"))


class SearchSpace(ABC):
    @abstractmethod
    def contains(self, element: Any) -> bool: ...

    @abstractmethod
    def elements(self) -> list[Any] | None:
        """Every member in a fixed order, or None when the space is only sampled."""

    @abstractmethod
    def sample(self, rng: np.random.Generator) -> Any:
        """Draw a candidate; it may fall outside the space, callers check ``contains``."""

    @abstractmethod
    def precedes(self, x: Any, y: Any) -> bool: ...

    @abstractmethod
    def latency(self, element: Any) -> float: ...

    @abstractmethod
    def parse(self, text: str) -> Any: ...


class ExplicitSpace(SearchSpace):
    """A fixed list of elements with known latencies."""

    def __init__(
        self,
        latencies: Mapping[Any, float],
        precedes_fn: Callable[[Any, Any], bool] = element_precedes,
        parse_fn: Callable[[str], Any] = parse_element,
    ) -> None:
        self._latencies = dict(latencies)
        self._elements = list(self._latencies)
        self._precedes = precedes_fn
        self._parse = parse_fn

    def contains(self, element: Any) -> bool:
        return element in self._latencies

    def elements(self) -> list[Any]:
        return self._elements

    def sample(self, rng: np.random.Generator) -> Any:
        return self._elements[int(rng.integers(len(self._elements)))]

    def precedes(self, x: Any, y: Any) -> bool:
        return self._precedes(x, y)

    def latency(self, element: Any) -> float:
        return self._latencies[element]

    def parse(self, text: str) -> Any:
        return self._parse(text)


class BackboneSpace(SearchSpace):
    """Backbones whose table-estimated latency lies in a band."""

    def __init__(
        self,
        table: LatencyTable,
        band: LatencyBand = UNBOUNDED,
        alphabet: Iterable[int] = DEFAULT_ALPHABET,
        kind: BlockKind = BlockKind.BASIC,
        resolution: int = 224,
        classes: int = 1000,
        max_blocks_per_stage: int = 32,
        stem: tuple[int, int] = DEFAULT_STEM,
        materialize: bool = True,
    ) -> None:
        self.table = table
        self.band = band
        self.alphabet = tuple(sorted(set(alphabet)))
        self.kind = kind
        self.resolution = resolution
        self.classes = classes
        self.max_blocks_per_stage = max_blocks_per_stage
        self.stem = tuple(stem)
        self._latencies: dict[ArchitectureCode, float] = {}
        self._elements: list[ArchitectureCode] | None = None
        if materialize:
            self._latencies = enumerate_subspace(
                band, table, self.alphabet, kind, resolution, classes, max_blocks_per_stage, self.stem,
            )
            self._elements = list(self._latencies)

    def contains(self, element: Any) -> bool:
        if not isinstance(element, ArchitectureCode):
            return False
        if self._elements is not None:
            return element in self._latencies
        if element.block_kind is not self.kind or tuple(element.stem) != self.stem:
            return False
        if any(len(s) > self.max_blocks_per_stage for s in element.stages):
            return False
        if any(w not in self.alphabet for w in element.widths):
            return False
        try:
            return self.latency(element) in self.band
        except DataError:
            return False

    def elements(self) -> list[ArchitectureCode] | None:
        return self._elements

    def sample(self, rng: np.random.Generator) -> ArchitectureCode:
        return random_code(rng, self.alphabet, self.kind, self.max_blocks_per_stage, self.stem)

    def precedes(self, x: ArchitectureCode, y: ArchitectureCode) -> bool:
        return precedes(x, y)

    def latency(self, element: ArchitectureCode) -> float:
        cached = self._latencies.get(element)
        if cached is None:
            cached = estimate_latency(element, self.table, self.resolution, self.classes)
            self._latencies[element] = cached
        return cached

    def parse(self, text: str) -> ArchitectureCode:
        return parse_code(text, self.alphabet, self.stem)


class DecoderSpace(SearchSpace):
    """Channel-controller settings for a fixed class count.

    Latency comes from a table (summing the decoder layers on top of
    *backbone*) or from a per-code latency map; in the latter case only
    the listed codes are members.
    """

    def __init__(
        self,
        num_classes: int,
        table: LatencyTable | None = None,
        backbone: ArchitectureCode | None = None,
        resolution: int = 224,
        latencies: Mapping[DecoderCode, float] | None = None,
        band: LatencyBand = UNBOUNDED,
    ) -> None:
        if latencies is None and (table is None or backbone is None):
            raise ValueError("DecoderSpace needs either a latency map or a table plus backbone")
        self.num_classes = num_classes
        self.band = band
        self.alphabet = decoder_alphabet(num_classes)
        self._latencies: dict[DecoderCode, float] = {}
        for code in enumerate_decoder_space(num_classes):
            if latencies is not None:
                if code not in latencies:
                    continue
                latency = latencies[code]
            else:
                latency = sum_latency(decoder_configs(code, backbone, resolution), table)
            if latency in band:
                self._latencies[code] = latency
        self._elements = list(self._latencies)

    def contains(self, element: Any) -> bool:
        return element in self._latencies

    def elements(self) -> list[DecoderCode]:
        return self._elements

    def sample(self, rng: np.random.Generator) -> DecoderCode:
        cc = tuple(int(c) for c in rng.choice(self.alphabet, size=3))
        return DecoderCode.model_construct(num_classes=self.num_classes, cc=cc)

    def precedes(self, x: DecoderCode, y: DecoderCode) -> bool:
        return decoder_precedes(x, y)

    def latency(self, element: DecoderCode) -> float:
        return self._latencies[element]

    def parse(self, text: str) -> DecoderCode:
        return parse_decoder_code(text)
