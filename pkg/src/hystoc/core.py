"""Shared domain types and log-domain arithmetic.

All scores are natural logarithms. Zero mass is ``-inf``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Tuple

NEG_INF = -math.inf

#: Reserved token for the "no word here" alternative of a bin.
EPS = "<eps>"


class HystocError(ValueError):
    """Raised on malformed input or a violated contract."""


_WHITESPACE = re.compile(r"\s")


def validate_token(token: str) -> str:
    if not isinstance(token, str) or not token:
        raise HystocError(f"token must be a non-empty string, got {token!r}")
    if token == EPS:
        raise HystocError(f"{EPS} is reserved and cannot be a surface token")
    if _WHITESPACE.search(token):
        raise HystocError(f"token {token!r} contains whitespace")
    return token


def validate_tokens(tokens: Sequence[str]) -> Tuple[str, ...]:
    tokens = tuple(tokens)
    try:
        ok = not (_WHITESPACE.search("".join(tokens)) or "" in tokens or EPS in tokens)
    except TypeError:
        ok = False
    if not ok:
        for t in tokens:
            validate_token(t)
    return tokens


def tokenize(text: str) -> Tuple[str, ...]:
    """Split a transcript on whitespace; no other normalization."""
    return tuple(validate_token(t) for t in text.split())


@dataclass(frozen=True)
class Hypothesis:
    tokens: Tuple[str, ...]
    score: float

    def __post_init__(self):
        tokens = validate_tokens(self.tokens)
        score = float(self.score)
        if not math.isfinite(score):
            raise HystocError(f"hypothesis score must be finite, got {self.score!r}")
        object.__setattr__(self, "tokens", tokens)
        object.__setattr__(self, "score", score)

    @classmethod
    def from_text(cls, text: str, score: float) -> "Hypothesis":
        return cls(tokenize(text), score)

    def __len__(self):
        return len(self.tokens)


@dataclass(frozen=True)
class NBestList:
    """Hypotheses for one utterance, kept in decreasing score order.

    Construction sorts the given hypotheses stably, so equal scores keep
    their input order.
    """

    utterance_id: str
    hypotheses: Tuple[Hypothesis, ...]
    system_id: Optional[str] = field(default=None, compare=True)

    def __post_init__(self):
        if not self.utterance_id or any(ch.isspace() for ch in self.utterance_id):
            raise HystocError(f"bad utterance id {self.utterance_id!r}")
        hyps = tuple(self.hypotheses)
        if not hyps:
            raise HystocError(f"utterance {self.utterance_id}: n-best list is empty")
        hyps = tuple(sorted(hyps, key=lambda h: -h.score))
        object.__setattr__(self, "hypotheses", hyps)

    def __len__(self):
        return len(self.hypotheses)

    def __iter__(self):
        return iter(self.hypotheses)

    @property
    def scores(self) -> Tuple[float, ...]:
        return tuple(h.score for h in self.hypotheses)

    def top(self, n: int) -> "NBestList":
        if n < 1:
            raise HystocError(f"top_n must be positive, got {n}")
        return NBestList(self.utterance_id, self.hypotheses[:n], self.system_id)


def log_add_exp(a: float, b: float) -> float:
    """``log(exp(a) + exp(b))`` without overflow."""
    if a == NEG_INF:
        return b
    if b == NEG_INF:
        return a
    if a >= b:
        return a + math.log1p(math.exp(b - a))
    return b + math.log1p(math.exp(a - b))


def log_sum_exp(values: Iterable[float]) -> float:
    values = list(values)
    if not values:
        return NEG_INF
    m = max(values)
    if m == NEG_INF:
        return NEG_INF
    return m + math.log(math.fsum(math.exp(v - m) for v in values))


def softmax(values: Sequence[float]) -> list:
    """Normalize log-masses into probabilities.

    Raises HystocError when every entry is ``-inf`` (an empty bin).
    """
    if not values:
        raise HystocError("softmax of an empty list")
    m = max(values)
    if m == NEG_INF:
        raise HystocError("softmax over a bin with zero total mass")
    if math.isnan(m) or m == math.inf:
        raise HystocError(f"softmax input must be finite or -inf, got {m}")
    exps = [math.exp(v - m) for v in values]
    total = math.fsum(exps)
    return [e / total for e in exps]
