"""Corpus WER and confidence-vs-accuracy cohorts."""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from typing import List, Mapping, Sequence, Tuple

from hystoc.align import OpKind, align_codes, encode, word_error_count
from hystoc.confnet import ConfidentTranscript
from hystoc.core import HystocError


@dataclass(frozen=True)
class WerReport:
    substitutions: int
    deletions: int
    insertions: int
    ref_words: int

    @property
    def errors(self) -> int:
        return self.substitutions + self.deletions + self.insertions

    @property
    def wer(self) -> float:
        return self.errors / self.ref_words

    def __add__(self, other: "WerReport") -> "WerReport":
        return WerReport(self.substitutions + other.substitutions,
                         self.deletions + other.deletions,
                         self.insertions + other.insertions,
                         self.ref_words + other.ref_words)


@dataclass(frozen=True)
class CalibrationCohort:
    cohort_index: int
    median_confidence: float
    accuracy: float
    count: int


def corpus_wer(refs: Mapping[str, Sequence[str]], hyps: Mapping[str, Sequence[str]]) -> WerReport:
    """Sum S/D/I over utterances. A reference without a hypothesis counts
    as fully deleted; a hypothesis without a reference is an error."""
    missing = sorted(set(hyps) - set(refs))
    if missing:
        raise HystocError(f"hypotheses without reference: {' '.join(missing)}")
    s = d = i = n = 0
    for utt, ref in refs.items():
        cs, cd, ci = word_error_count(ref, hyps.get(utt, ()))
        s, d, i, n = s + cs, d + cd, i + ci, n + len(ref)
    if n == 0:
        raise HystocError("references contain no words; WER is undefined")
    return WerReport(s, d, i, n)


def mark_correctness(ref: Sequence[str], hyp: ConfidentTranscript) -> List[Tuple[float, bool]]:
    """One ``(confidence, correct)`` pair per hypothesis word.

    A word is correct iff it aligns to the reference as a match. Deleted
    reference words produce no entry.
    """
    h, r = encode(hyp.tokens, ref)
    _, kinds, hyp_idx, _ = align_codes(h, r)
    correct = [False] * len(hyp.words)
    for kind, hi in zip(kinds.tolist(), hyp_idx.tolist()):
        if kind == OpKind.MATCH:
            correct[hi] = True
    return [(w.confidence, ok) for w, ok in zip(hyp.words, correct)]


def calibration_cohorts(scored: Sequence[Tuple[float, bool]],
                        cohort_size: int = 2500) -> List[CalibrationCohort]:
    """Sort by confidence, cut into consecutive equal-count cohorts.

    A trailing partial cohort is kept with its true count.
    """
    if not scored:
        raise HystocError("no scored tokens")
    if cohort_size < 1:
        raise HystocError(f"cohort size must be positive, got {cohort_size}")
    ordered = sorted(scored, key=lambda item: item[0])
    cohorts = []
    for k, start in enumerate(range(0, len(ordered), cohort_size)):
        chunk = ordered[start:start + cohort_size]
        correct = sum(1 for _, ok in chunk if ok)
        cohorts.append(CalibrationCohort(
            cohort_index=k,
            median_confidence=statistics.median(c for c, _ in chunk),
            accuracy=correct / len(chunk),
            count=len(chunk),
        ))
    return cohorts
