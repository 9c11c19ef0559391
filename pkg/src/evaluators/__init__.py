from src.evaluators.base import Evaluator
from src.evaluators.external import CommandSpec, ExternalCommandEvaluator, external_accuracy
from src.evaluators.replay import ReplayEvaluator, load_replay, replay_accuracy
from src.evaluators.synthetic import SyntheticEvaluator, SyntheticOracleParams, synthetic_accuracy

__all__ = [
    "CommandSpec",
    "Evaluator",
    "ExternalCommandEvaluator",
    "ReplayEvaluator",
    "SyntheticEvaluator",
    "SyntheticOracleParams",
    "build_evaluator",
    "external_accuracy",
    "load_replay",
    "replay_accuracy",
    "synthetic_accuracy",
]


def build_evaluator(
    spec: str,
    params: SyntheticOracleParams | None = None,
    timeout_s: float = 3600.0,
    concurrency_safe: bool = False,
    parse=None,
) -> Evaluator:
    """Build an evaluator from ``synthetic``, ``replay:FILE`` or ``cmd:COMMAND``."""
    name, _, arg = spec.partition(":")
    if name == "synthetic" and not arg:
        return SyntheticEvaluator(params or SyntheticOracleParams())
    if name == "replay" and arg:
        return ReplayEvaluator.from_file(arg, parse) if parse else ReplayEvaluator.from_file(arg)
    if name == "cmd" and arg:
        return ExternalCommandEvaluator(
            CommandSpec.from_string(arg, timeout_s=timeout_s, concurrency_safe=concurrency_safe)
        )
    raise ValueError(f"unknown evaluator {spec!r}; expected synthetic, replay:FILE or cmd:COMMAND")
