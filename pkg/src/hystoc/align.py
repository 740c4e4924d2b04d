"""Unit-cost Levenshtein alignment with a fixed backtrace tie-break.

``levenshtein_align(hyp, ref)`` aligns a hypothesis against a reference.
DELETE means a reference token missing from the hypothesis, INSERT a
hypothesis token with no reference counterpart. Among cost-optimal scripts
the backtrace, walking from the bottom-right cell, prefers
MATCH > SUBSTITUTE > DELETE > INSERT at every cell.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Dict, Hashable, Optional, Sequence, Tuple

import numpy as np

from hystoc._kernels import backtrace


class OpKind(enum.IntEnum):
    MATCH = 0
    SUBSTITUTE = 1
    DELETE = 2
    INSERT = 3


@dataclass(frozen=True)
class EditOp:
    kind: OpKind
    ref_index: Optional[int] = None
    hyp_index: Optional[int] = None


@dataclass(frozen=True)
class EditScript:
    ops: Tuple[EditOp, ...]
    distance: int

    def counts(self) -> Dict[OpKind, int]:
        out = {k: 0 for k in OpKind}
        for op in self.ops:
            out[op.kind] += 1
        return out


def encode(hyp: Sequence[Hashable], ref: Sequence[Hashable], vocab: Optional[dict] = None):
    """Map both sequences to int64 arrays over a shared vocabulary."""
    if vocab is None:
        vocab = {}
    setdefault = vocab.setdefault
    h = np.fromiter((setdefault(t, len(vocab)) for t in hyp), dtype=np.int64, count=len(hyp))
    r = np.fromiter((setdefault(t, len(vocab)) for t in ref), dtype=np.int64, count=len(ref))
    return h, r


def align_codes(hyp_ids: np.ndarray, ref_ids: np.ndarray):
    """Raw alignment on integer-coded sequences.

    Returns ``(distance, kinds, hyp_index, ref_index)``; absent indices are -1.
    """
    return backtrace(hyp_ids, ref_ids)


def levenshtein_align(hyp: Sequence[Hashable], ref: Sequence[Hashable]) -> EditScript:
    h, r = encode(hyp, ref)
    distance, kinds, hi, ri = align_codes(h, r)
    ops = []
    for kind, a, b in zip(kinds.tolist(), hi.tolist(), ri.tolist()):
        kind = OpKind(kind)
        ops.append(EditOp(kind, None if b < 0 else b, None if a < 0 else a))
    return EditScript(tuple(ops), int(distance))


def word_error_count(ref: Sequence[str], hyp: Sequence[str]) -> Tuple[int, int, int]:
    """(substitutions, deletions, insertions) of ``hyp`` against ``ref``."""
    h, r = encode(hyp, ref)
    _, kinds, _, _ = align_codes(h, r)
    counts = np.bincount(kinds, minlength=4)
    return int(counts[OpKind.SUBSTITUTE]), int(counts[OpKind.DELETE]), int(counts[OpKind.INSERT])
