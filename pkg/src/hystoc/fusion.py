"""System combination.

``rover_fuse`` votes over one confident transcript per system.
``hystoc_fuse`` pools the n-best lists of several systems into a single
confusion network.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from hystoc._kernels import TIE_TOL
from hystoc.align import align_codes, encode
from hystoc.confnet import (
    ConfidentTranscript,
    ConfidentWord,
    ConfusionNetwork,
    build_from_ordered,
    transcript_from_network,
)
from hystoc.core import EPS, HystocError, Hypothesis, NBestList, log_sum_exp

_MATCH, _SUB, _DEL, _INS = 0, 1, 2, 3
_TINY = 1e-12


@dataclass(frozen=True)
class RoverParams:
    alpha: float = 0.5
    eps_confidence: float = 0.5

    def __post_init__(self):
        for name in ("alpha", "eps_confidence"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise HystocError(f"{name} must lie in [0, 1], got {v!r}")


class FusionScheme(enum.Enum):
    DIRECT = "direct"
    NORMALIZED = "normalized"
    NORMALIZED_ROUND_ROBIN = "normalized-rr"


def _shared_utterance(items) -> str:
    if not items:
        raise HystocError("fusion needs at least one system")
    utt = items[0].utterance_id
    for it in items[1:]:
        if it.utterance_id != utt:
            raise HystocError(f"utterance ids differ: {utt!r} vs {it.utterance_id!r}")
    return utt


def _slot_reference(slot) -> str:
    """Most-voted entry of a slot; ties go to a word over epsilon, then
    higher summed confidence, then the smaller word."""
    tally = {}
    for token, conf in slot:
        n, c = tally.get(token, (0, 0.0))
        tally[token] = (n + 1, c + conf)
    best, best_key = None, None
    for token, (n, c) in tally.items():
        key = (n, token != EPS, c)
        if best is None or key > best_key or (key == best_key and token < best):
            best, best_key = token, key
    return best


def _build_slots(transcripts: Sequence[ConfidentTranscript], eps_conf: float):
    slots: List[List[Tuple[str, float]]] = []
    vocab: dict = {}
    for s, tr in enumerate(transcripts):
        ref, ref_slots = [], []
        for k, slot in enumerate(slots):
            w = _slot_reference(slot)
            if w != EPS:
                ref.append(w)
                ref_slots.append(k)
        h, r = encode(tr.tokens, ref, vocab)
        _, kinds, hyp_idx, ref_idx = align_codes(h, r)

        out, pending, nxt = [], [], 0
        for kind, hi, ri in zip(kinds.tolist(), hyp_idx.tolist(), ref_idx.tolist()):
            if kind == _INS:
                word = tr.words[hi]
                pending.append([(EPS, eps_conf)] * s + [(word.token, word.confidence)])
                continue
            k = ref_slots[ri]
            for skipped in slots[nxt:k]:
                skipped.append((EPS, eps_conf))
                out.append(skipped)
            out.extend(pending)
            pending = []
            if kind == _DEL:
                slots[k].append((EPS, eps_conf))
            else:
                word = tr.words[hi]
                slots[k].append((word.token, word.confidence))
            out.append(slots[k])
            nxt = k + 1
        for skipped in slots[nxt:]:
            skipped.append((EPS, eps_conf))
            out.append(skipped)
        out.extend(pending)
        slots = out
    return slots


def _vote(slot, n_sys: int, params: RoverParams):
    tally = {}
    for token, conf in slot:
        n, c = tally.get(token, (0, 0.0))
        tally[token] = (n + 1, c + conf)
    best = None
    for token, (n, c) in tally.items():
        mean = params.eps_confidence if token == EPS else c / n
        score = params.alpha * n / n_sys + (1.0 - params.alpha) * mean
        key = (score, mean, token != EPS)
        if best is None or key > best[0] or (key == best[0] and token < best[1]):
            best = (key, token)
    (score, _, _), token = best
    return token, score


def rover_fuse(transcripts: Sequence[ConfidentTranscript],
               params: RoverParams = RoverParams()) -> ConfidentTranscript:
    """Confidence-weighted voting over one transcript per system.

    A slot's entry ``w`` scores ``alpha * N(w) / N_sys + (1 - alpha) * mean
    confidence``; epsilon uses the fixed ``eps_confidence`` instead of a mean
    and only competes where some system actually skips the slot.
    """
    utt = _shared_utterance(transcripts)
    n_sys = len(transcripts)
    words = []
    for slot in _build_slots(transcripts, params.eps_confidence):
        token, score = _vote(slot, n_sys, params)
        if token != EPS:
            words.append(ConfidentWord(token, min(1.0, max(score, _TINY))))
    return ConfidentTranscript(utt, tuple(words))


def _normalized(nbest: NBestList) -> List[Hypothesis]:
    norm = log_sum_exp(nbest.scores)
    return [Hypothesis(h.tokens, h.score - norm) for h in nbest.hypotheses]


def _tolerant_order(scores: Sequence[float]) -> List[int]:
    """Indices by descending score; runs of scores chained within TIE_TOL
    keep their input order, as exact ties would under a stable sort."""
    order = sorted(range(len(scores)), key=lambda i: -scores[i])
    out, run = [], order[:1]
    for prev, i in zip(order, order[1:]):
        if scores[prev] - scores[i] > TIE_TOL:
            out.extend(sorted(run))
            run = []
        run.append(i)
    out.extend(sorted(run))
    return out


def pool_hypotheses(nbests: Sequence[NBestList], scheme: FusionScheme) -> List[Hypothesis]:
    """Hypotheses of all systems in the order they get aligned."""
    scheme = FusionScheme(scheme)
    if scheme is FusionScheme.DIRECT:
        pooled = [h for nb in nbests for h in nb.hypotheses]
        return sorted(pooled, key=lambda h: -h.score)
    per_system = [_normalized(nb) for nb in nbests]
    if scheme is FusionScheme.NORMALIZED:
        pooled = [h for hyps in per_system for h in hyps]
        return [pooled[i] for i in _tolerant_order([h.score for h in pooled])]
    depth = max(len(hyps) for hyps in per_system)
    return [hyps[rank] for rank in range(depth) for hyps in per_system if rank < len(hyps)]


def hystoc_fuse(nbests: Sequence[NBestList], scheme: FusionScheme,
                temperature: float = 1.0) -> Tuple[ConfusionNetwork, ConfidentTranscript]:
    utt = _shared_utterance(nbests)
    if not temperature > 0 or not math.isfinite(temperature):
        raise HystocError(f"fusion temperature must be positive, got {temperature!r}")
    cn = build_from_ordered(utt, pool_hypotheses(nbests, scheme), temperature)
    return cn, transcript_from_network(cn)
