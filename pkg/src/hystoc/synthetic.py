"""Synthetic recognizer output with exactly known scores.

A reference is sampled, then corrupted ``corruptions`` times by a channel
that keeps each word with probability ``1 - e``, deletes it with
probability ``e * deletion_share`` and otherwise swaps it for one of a few
confusable words. The per-utterance error rate ``e`` is drawn uniformly
from ``error_rate``. Every corruption is scored with its exact log
likelihood under the channel, so the generator is its own oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from hystoc.core import Hypothesis, NBestList


@dataclass
class ChannelConfig:
    vocab_size: int = 200
    min_length: int = 4
    max_length: int = 8
    confusables: int = 2
    error_rate: Tuple[float, float] = (0.2, 0.9)
    deletion_share: float = 0.3
    corruptions: int = 10


def _word(k: int) -> str:
    return f"w{k}"


def sample_reference(rng: np.random.Generator, cfg: ChannelConfig, length: int = None) -> np.ndarray:
    """Word ids of a random reference."""
    if length is None:
        length = int(rng.integers(cfg.min_length, cfg.max_length + 1))
    return rng.integers(0, cfg.vocab_size, size=length)


def corrupt(rng: np.random.Generator, cfg: ChannelConfig, reference: np.ndarray,
            utterance_id: str) -> NBestList:
    """Exactly scored corruptions of ``reference``; identical events are kept once."""
    length = len(reference)
    c = cfg.confusables
    # column 0 keeps the word, 1..c substitute, the last column deletes
    table = np.empty((length, c + 2), dtype=object)
    for j, r in enumerate(reference.tolist()):
        others = rng.choice(cfg.vocab_size - 1, size=c, replace=False)
        others = others + (others >= r)
        table[j, 0] = _word(r)
        table[j, 1:c + 1] = [_word(int(o)) for o in others]
        table[j, c + 1] = None
    e = rng.uniform(*cfg.error_rate)
    probs = np.array([1 - e] + [e * (1 - cfg.deletion_share) / c] * c + [e * cfg.deletion_share])
    events = np.unique(rng.choice(c + 2, size=(cfg.corruptions, length), p=probs), axis=0)
    scores = np.log(probs[events]).sum(axis=1)
    hyps = []
    for row, score in zip(events.tolist(), scores.tolist()):
        tokens = tuple(w for w in table[np.arange(length), row] if w is not None)
        hyps.append(Hypothesis(tokens, score))
    return NBestList(utterance_id, tuple(hyps))


def sample_utterance(rng: np.random.Generator, cfg: ChannelConfig, utterance_id: str,
                     length: int = None) -> Tuple[Tuple[str, ...], NBestList]:
    """One (reference, n-best) pair."""
    reference = sample_reference(rng, cfg, length)
    nbest = corrupt(rng, cfg, reference, utterance_id)
    return tuple(map(_word, reference.tolist())), nbest


def sample_corpus(n_utterances: int, seed: int = 0, cfg: ChannelConfig = None,
                  length: int = None) -> Tuple[Dict[str, Tuple[str, ...]], List[NBestList]]:
    cfg = cfg or ChannelConfig()
    rng = np.random.default_rng(seed)
    refs, nbests = {}, []
    for u in range(n_utterances):
        utt = f"utt{u:05d}"
        ref, nb = sample_utterance(rng, cfg, utt, length)
        refs[utt] = ref
        nbests.append(nb)
    return refs, nbests


def perturbed_nbest(rng: np.random.Generator, utterance_id: str, length: int = 30,
                    depth: int = 100, vocab_size: int = 300, max_edits: int = 4) -> NBestList:
    """Random edits of one base sentence, scored by rank. Used for throughput."""
    base = [_word(int(w)) for w in rng.integers(0, vocab_size, size=length)]
    hyps = []
    for rank in range(depth):
        h = list(base)
        for _ in range(int(rng.integers(0, max_edits + 1))):
            op, pos = rng.random(), int(rng.integers(0, len(h) + 1))
            if op < 0.5 and pos < len(h):
                h[pos] = _word(int(rng.integers(0, vocab_size)))
            elif op < 0.75 and pos < len(h):
                del h[pos]
            else:
                h.insert(pos, _word(int(rng.integers(0, vocab_size))))
        hyps.append(Hypothesis(tuple(h), -0.3 * rank - float(rng.random())))
    return NBestList(utterance_id, tuple(hyps))
