from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Any


class Evaluator(ABC):
    """Accuracy oracle. ``evaluate`` returns a fraction in [0, 1]."""

    # Whether evaluate() may run from several threads at once.
    concurrency_safe: bool = False

    @abstractmethod
    def evaluate(self, element: Any) -> float: ...
