"""Error hierarchy shared by the library and the CLI.

``DataError`` covers bad or missing input data (CLI exit 2) and
``EvaluatorError`` covers accuracy oracle failures (CLI exit 3).
"""

from __future__ import annotations

from typing import Any


class PopError(Exception):
    """Base class for every error raised by popnas."""


# ---------------------------------------------------------------------------
# Data errors
# ---------------------------------------------------------------------------

class DataError(PopError):
    pass


class ArchitectureSyntaxError(DataError, ValueError):
    """Architecture text does not match the grammar."""


class InvalidArchitectureError(DataError, ValueError):
    """Architecture parses but breaks a validity rule."""


class ResolutionError(DataError, ValueError):
    pass


class LatencyTableError(DataError, ValueError):
    """Malformed latency table file or entry."""


class MissingLatencyError(DataError, LookupError):
    """A block configuration has no entry in the latency table."""

    def __init__(self, config: Any) -> None:
        self.config = config
        super().__init__(f"No latency entry for {config}")


class RecordsFileError(DataError, ValueError):
    pass


class MissingRecordError(DataError, LookupError):
    def __init__(self, code: str) -> None:
        self.code = code
        super().__init__(f"No recorded accuracy for {code}")


class EmptySpaceError(DataError):
    pass


# ---------------------------------------------------------------------------
# Evaluator errors
# ---------------------------------------------------------------------------

class EvaluatorError(PopError):
    """An accuracy oracle failed. ``element`` names the code being evaluated."""

    def __init__(self, message: str, element: str | None = None) -> None:
        self.element = element
        if element is not None:
            message = f"{message} (while evaluating {element})"
        super().__init__(message)


class EvaluatorCommandError(EvaluatorError):
    def __init__(self, returncode: int, output: str, element: str | None = None) -> None:
        self.returncode = returncode
        self.output = output
        super().__init__(f"Evaluator command exited with status {returncode}: {output.strip()[:500]}", element)


class EvaluatorTimeoutError(EvaluatorError):
    pass


class EvaluatorOutputError(EvaluatorError):
    pass
