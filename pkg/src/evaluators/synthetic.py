"""Synthetic accuracy oracle.

Accuracy saturates with the network's total log-width mass::

    a_max * (1 - exp(-gamma * sum(log2(width)) / 10))

Adding a block adds a positive term and widening raises one, so without
noise the oracle strictly increases along the precedence order.
"""

from __future__ import annotations

import hashlib
import math
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.evaluators.base import Evaluator
from src.space.arch_space import ArchitectureCode
from src.space.decoder_space import DecoderCode


class SyntheticOracleParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    a_max: float = Field(0.8, gt=0, le=1)
    gamma: float = Field(0.05, gt=0)
    noise_sigma: float = Field(0.0, ge=0)
    seed: int = 0


def capacity(code: Any) -> float:
    if isinstance(code, ArchitectureCode):
        widths = code.widths
    elif isinstance(code, DecoderCode):
        widths = code.cc
    else:
        raise TypeError(f"synthetic oracle cannot score {type(code).__name__}")
    return sum(math.log2(w) for w in widths) / 10.0


def _noise(code: Any, seed: int) -> float:
    digest = hashlib.blake2b(f"{seed}:{code}".encode(), digest_size=8).digest()
    return float(np.random.default_rng(int.from_bytes(digest, "big")).standard_normal())


def synthetic_accuracy(code: Any, params: SyntheticOracleParams = SyntheticOracleParams()) -> float:
    value = params.a_max * (1.0 - math.exp(-params.gamma * capacity(code)))
    if params.noise_sigma:
        value += params.noise_sigma * _noise(code, params.seed)
    return min(1.0, max(0.0, value))


class SyntheticEvaluator(Evaluator):
    concurrency_safe = True

    def __init__(self, params: SyntheticOracleParams = SyntheticOracleParams()) -> None:
        self.params = params

    def evaluate(self, element: Any) -> float:
        return synthetic_accuracy(element, self.params)
