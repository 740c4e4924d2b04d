"""Confusion networks from scored n-best lists.

Hypotheses are aligned one at a time, best first, against the current
best path of the network. Every aligned hypothesis adds ``score / T`` to
exactly one entry of every bin: its own token, or epsilon where it skips
the position. Bins created by an insertion get an epsilon entry holding
the mass of all hypotheses aligned before, so each bin's total mass equals
the total aligned mass and per-bin softmax gives exact mass fractions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from hystoc._kernels import EPS_ID, TIE_TOL, build_network
from hystoc.core import (
    EPS,
    NEG_INF,
    HystocError,
    Hypothesis,
    NBestList,
    softmax,
)


@dataclass(frozen=True)
class Bin:
    """Competing tokens of one position, mapped to accumulated log-mass."""

    entries: Dict[str, float]

    def __post_init__(self):
        if not self.entries:
            raise HystocError("a bin needs at least one entry")

    def total(self) -> float:
        m = max(self.entries.values())
        return m + math.log(math.fsum(math.exp(v - m) for v in self.entries.values()))

    def posteriors(self) -> Dict[str, float]:
        probs = softmax(list(self.entries.values()))
        return dict(zip(self.entries.keys(), probs))


@dataclass(frozen=True)
class ConfusionNetwork:
    utterance_id: str
    bins: Tuple[Bin, ...]
    temperature: float
    aligned_mass: float = NEG_INF

    def __len__(self):
        return len(self.bins)


@dataclass(frozen=True)
class ConfidentWord:
    token: str
    confidence: float


@dataclass(frozen=True)
class ConfidentTranscript:
    utterance_id: str
    words: Tuple[ConfidentWord, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "words", tuple(self.words))
        for w in self.words:
            if w.token == EPS:
                raise HystocError("a transcript cannot contain epsilon")
            if not 0.0 < w.confidence <= 1.0:
                raise HystocError(f"confidence {w.confidence!r} outside (0, 1]")

    @property
    def tokens(self) -> Tuple[str, ...]:
        return tuple(w.token for w in self.words)

    @property
    def confidences(self) -> Tuple[float, ...]:
        return tuple(w.confidence for w in self.words)


@dataclass(frozen=True)
class RescoreWeights:
    lm_weight: float
    insertion_bonus: float
    am_weight: float = 1.0

    def __post_init__(self):
        if self.lm_weight < 0 or self.am_weight < 0:
            raise HystocError("lm_weight and am_weight must be non-negative")


def _ranks_before(token: str, other: str) -> bool:
    if token == other or token == EPS:
        return False
    return other == EPS or token < other


def _winner(entries: Mapping[str, float]) -> str:
    """Best-ranked entry among those within ``TIE_TOL`` of the top mass."""
    top = max(entries.values())
    best = None
    for token, mass in entries.items():
        if mass >= top - TIE_TOL and (best is None or _ranks_before(token, best)):
            best = token
    return best


def _best_path(bins: Sequence[Mapping[str, float]]) -> Tuple[List[str], List[int]]:
    tokens, index = [], []
    for b, entries in enumerate(bins):
        w = _winner(entries)
        if w != EPS:
            tokens.append(w)
            index.append(b)
    return tokens, index


def best_path(cn: ConfusionNetwork) -> Tuple[Tuple[str, ...], Tuple[int, ...]]:
    """Per-bin argmax; epsilon winners are dropped.

    Returns the token sequence and, for each token, the index of its bin.
    Log-masses within 1e-12 of the bin's top count as tied; ties prefer a
    word over epsilon, then the lexicographically smallest word.
    """
    tokens, index = _best_path([b.entries for b in cn.bins])
    return tuple(tokens), tuple(index)


def build_from_ordered(utterance_id: str, hypotheses: Sequence[Hypothesis],
                       temperature: float) -> ConfusionNetwork:
    """Align hypotheses into a network in exactly the given order."""
    if not hypotheses:
        raise HystocError(f"utterance {utterance_id}: no hypotheses to align")
    if not temperature > 0 or not math.isfinite(temperature):
        raise HystocError(f"temperature must be positive and finite, got {temperature!r}")
    vocab = {EPS: EPS_ID}
    ids, offsets = [], [0]
    for hyp in hypotheses:
        for t in hyp.tokens:
            k = vocab.get(t)
            if k is None:
                k = vocab[t] = len(vocab)
            ids.append(k)
        offsets.append(len(ids))
    names = list(vocab)
    lexrank = np.zeros(len(names), dtype=np.int64)
    for rank, k in enumerate(sorted(range(1, len(names)), key=names.__getitem__)):
        lexrank[k] = rank
    weights = np.array([hyp.score / temperature for hyp in hypotheses], dtype=np.float64)

    entry_bin, entry_tok, entry_mass, aligned_mass = build_network(
        np.array(ids, dtype=np.int64), np.array(offsets, dtype=np.int64), weights, lexrank)

    bins: List[Dict[str, float]] = []
    for b, k, m in zip(entry_bin.tolist(), entry_tok.tolist(), entry_mass.tolist()):
        if b == len(bins):
            bins.append({})
        bins[b][names[k]] = m
    return ConfusionNetwork(utterance_id, tuple(Bin(e) for e in bins), temperature,
                            float(aligned_mass))


def build_confusion_network(nbest: NBestList, temperature: float,
                            top_n: Optional[int] = None) -> ConfusionNetwork:
    if top_n is not None:
        nbest = nbest.top(top_n)
    return build_from_ordered(nbest.utterance_id, nbest.hypotheses, temperature)


def normalize(cn: ConfusionNetwork) -> List[Dict[str, float]]:
    """Per-bin posteriors, epsilon included."""
    return [b.posteriors() for b in cn.bins]


def transcript_from_network(cn: ConfusionNetwork) -> ConfidentTranscript:
    tokens, index = best_path(cn)
    words = []
    for token, b in zip(tokens, index):
        words.append(ConfidentWord(token, cn.bins[b].posteriors()[token]))
    return ConfidentTranscript(cn.utterance_id, tuple(words))


def extract_best(nbest: NBestList, temperature: float,
                 top_n: Optional[int] = None) -> ConfidentTranscript:
    """Best path with posterior confidences.

    ``temperature == 0`` returns the top hypothesis with all confidences
    1.0 and builds no network.
    """
    if temperature < 0 or math.isnan(temperature):
        raise HystocError(f"temperature must be >= 0, got {temperature!r}")
    if temperature == 0:
        top = nbest.hypotheses[0]
        return ConfidentTranscript(nbest.utterance_id,
                                   tuple(ConfidentWord(t, 1.0) for t in top.tokens))
    return transcript_from_network(build_confusion_network(nbest, temperature, top_n))


def rescore(nbest: NBestList, aux_scores: Mapping[int, float],
            weights: RescoreWeights) -> NBestList:
    """Fold auxiliary (e.g. LM) scores and a per-token bonus into the scores.

    ``aux_scores`` is keyed by position in ``nbest``. The result is re-sorted.
    """
    rescored = []
    for i, hyp in enumerate(nbest.hypotheses):
        if i not in aux_scores:
            raise HystocError(f"utterance {nbest.utterance_id}: no aux score for hypothesis {i}")
        score = (weights.am_weight * hyp.score
                 + weights.lm_weight * float(aux_scores[i])
                 + weights.insertion_bonus * len(hyp.tokens))
        rescored.append(Hypothesis(hyp.tokens, score))
    return NBestList(nbest.utterance_id, tuple(rescored), nbest.system_id)
