"""Precedence among backbone codes.

``x`` precedes ``y`` when ``y`` can be reached from ``x`` by adding blocks
and widening blocks. Per stage this is a dominated-subsequence test:
every block of ``x`` maps, in order, onto a distinct block of ``y`` at
least as wide.
"""

from __future__ import annotations

import bisect
from collections.abc import Callable, Hashable, Iterable, Sequence
from enum import Enum

from src.space.arch_space import DEFAULT_ALPHABET, ArchitectureCode


class Precedence(str, Enum):
    PRECEDES_STRICT = "precedes_strict"
    EQUAL = "equal"
    SUCCEEDS_STRICT = "succeeds_strict"
    INCOMPARABLE = "incomparable"


def _embeds(small: Sequence[int], large: Sequence[int]) -> bool:
    """Greedy dominated-subsequence check."""
    if len(small) > len(large):
        return False
    j = 0
    for width in small:
        while j < len(large) and large[j] < width:
            j += 1
        if j == len(large):
            return False
        j += 1
    return True


def _comparable_family(x: ArchitectureCode, y: ArchitectureCode) -> bool:
    return x.block_kind is y.block_kind and tuple(x.stem) == tuple(y.stem)


def precedes(x: ArchitectureCode, y: ArchitectureCode) -> bool:
    """Strict ``x ≺ y``. Codes of different kind or stem are incomparable."""
    if not _comparable_family(x, y) or x.stages == y.stages:
        return False
    return all(_embeds(xs, ys) for xs, ys in zip(x.stages, y.stages))


def compare(x: ArchitectureCode, y: ArchitectureCode) -> Precedence:
    if _comparable_family(x, y) and x.stages == y.stages:
        return Precedence.EQUAL
    if precedes(x, y):
        return Precedence.PRECEDES_STRICT
    if precedes(y, x):
        return Precedence.SUCCEEDS_STRICT
    return Precedence.INCOMPARABLE


def elementary_shrinks(x: ArchitectureCode, alphabet: Iterable[int] = DEFAULT_ALPHABET) -> set[ArchitectureCode]:
    """Codes one generator step below *x*: one block deleted or one width lowered a notch."""
    levels = sorted(set(alphabet))
    stages = [list(s) for s in x.stages]
    result: set[ArchitectureCode] = set()

    def emit(new_stages: list[list[int]]) -> None:
        result.add(ArchitectureCode.model_construct(
            stages=tuple(tuple(s) for s in new_stages), block_kind=x.block_kind, stem=tuple(x.stem),
        ))

    previous = 0
    for s, stage in enumerate(stages):
        for i, width in enumerate(stage):
            if len(stage) > 1:
                emit([st if k != s else st[:i] + st[i + 1:] for k, st in enumerate(stages)])
            pos = bisect.bisect_left(levels, width)
            if pos > 0 and levels[pos - 1] >= previous:
                lowered = stage.copy()
                lowered[i] = levels[pos - 1]
                emit([st if k != s else lowered for k, st in enumerate(stages)])
            previous = width
    return result


def precedents(x: ArchitectureCode, space: Iterable[ArchitectureCode]) -> list[ArchitectureCode]:
    return [m for m in space if precedes(m, x)]


def count_precedents(x: ArchitectureCode, space: Iterable[ArchitectureCode]) -> int:
    return sum(1 for m in space if precedes(m, x))


def precedent_counts(
    space: Sequence[Hashable],
    relation: Callable[[Hashable, Hashable], bool] = precedes,
) -> dict[Hashable, int]:
    """Strict-precedent count of every element, under *relation* (backbone precedence by default)."""
    return {x: sum(1 for m in space if relation(m, x)) for x in space}
