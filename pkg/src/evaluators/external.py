"""Bridge to an external trainer.

The command is run with the canonical code text appended as its last
argument and must print the accuracy first on its first non-empty
stdout line, as a fraction (``0.698``) or a percentage (``69.8%``).
"""

from __future__ import annotations

import logging
import shlex
import subprocess
from typing import Any

from pydantic import BaseModel, ConfigDict, Field

from src.errors import EvaluatorCommandError, EvaluatorOutputError, EvaluatorTimeoutError
from src.evaluators.base import Evaluator
from src.search.records import parse_accuracy

logger = logging.getLogger("popnas")


class CommandSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    argv: tuple[str, ...]
    timeout_s: float = Field(3600.0, gt=0)
    concurrency_safe: bool = False

    @classmethod
    def from_string(cls, command: str, **kwargs: Any) -> "CommandSpec":
        argv = tuple(shlex.split(command))
        if not argv:
            raise ValueError("empty evaluator command")
        return cls(argv=argv, **kwargs)


def parse_command_output(stdout: str) -> float:
    for line in stdout.splitlines():
        if line.strip():
            return parse_accuracy(line.split()[0])
    raise ValueError("no output")


def external_accuracy(code: Any, spec: CommandSpec) -> float:
    text = str(code)
    argv = [*spec.argv, text]
    logger.debug("Running evaluator: %s", shlex.join(argv))
    try:
        proc = subprocess.run(argv, capture_output=True, text=True, timeout=spec.timeout_s)
    except subprocess.TimeoutExpired as e:
        partial = e.stdout.decode(errors="replace") if isinstance(e.stdout, bytes) else (e.stdout or "")
        raise EvaluatorTimeoutError(
            f"evaluator command timed out after {spec.timeout_s}s; output so far: {partial.strip()[:500]!r}", text,
        ) from None
    except OSError as e:
        raise EvaluatorCommandError(-1, str(e), text) from None
    if proc.returncode != 0:
        raise EvaluatorCommandError(proc.returncode, proc.stdout + proc.stderr, text)
    try:
        return parse_command_output(proc.stdout)
    except ValueError as e:
        raise EvaluatorOutputError(f"cannot read accuracy from {proc.stdout.strip()[:200]!r}: {e}", text) from None


class ExternalCommandEvaluator(Evaluator):
    def __init__(self, spec: CommandSpec) -> None:
        self.spec = spec
        self.concurrency_safe = spec.concurrency_safe

    def evaluate(self, element: Any) -> float:
        return external_accuracy(element, self.spec)
