"""Plain-text interchange formats. UTF-8, LF line endings, one record per line.

n-best      ``<utt-id> <score> <token>*``        score is a natural log
aux scores  ``<utt-id> <rank> <aux-score>``      rank is the 0-based position
                                                 in the parsed (sorted) n-best
sausage     ``<utt-id> <bin> <token|<eps>> <posterior>``
transcript  ``<utt-id> <position> <word> <confidence>``; an utterance with
            an empty transcript is a line holding only ``<utt-id>``
reference   ``<utt-id> <token>*``

Fields are separated by a single space or tab. In n-best and reference
files blank lines and ``#`` comments are skipped. Output is ordered by
utterance id.
"""

from __future__ import annotations

import math
import re
from collections import defaultdict
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Sequence, Tuple, Union

from hystoc.confnet import ConfidentTranscript, ConfidentWord, ConfusionNetwork, normalize
from hystoc.core import EPS, HystocError, Hypothesis, NBestList

PathLike = Union[str, Path]
_SEP = re.compile(r"[ \t]")
_OTHER_WHITESPACE = re.compile(r"[^\S \t]")


class FormatError(HystocError):
    def __init__(self, path, line: int, message: str, column: int = None):
        where = f"{path}:{line}" if column is None else f"{path}:{line}:{column}"
        super().__init__(f"{where}: {message}")
        self.path, self.line, self.column = path, line, column


def _records(path: PathLike, skip_comments: bool = True) -> Iterator[Tuple[int, List[str]]]:
    with open(path, "rb") as fh:
        for lineno, raw in enumerate(fh, 1):
            try:
                line = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise FormatError(path, lineno, f"not valid UTF-8 ({exc.reason})") from None
            if line.endswith("\n"):
                line = line[:-1]
            if skip_comments and (not line.strip() or line.startswith("#")):
                continue
            fields = _SEP.split(line)
            if "" in fields or _OTHER_WHITESPACE.search(line):
                for col, f in enumerate(fields, 1):
                    if not f:
                        raise FormatError(path, lineno, "empty field (repeated or stray separator)", col)
                    if _OTHER_WHITESPACE.search(f):
                        raise FormatError(path, lineno, f"field {f!r} contains whitespace", col)
            yield lineno, fields


def _float(path, lineno, col, text) -> float:
    try:
        value = float(text)
    except ValueError:
        raise FormatError(path, lineno, f"not a number: {text!r}", col) from None
    if not math.isfinite(value):
        raise FormatError(path, lineno, f"non-finite value {text!r}", col)
    return value


def _int(path, lineno, col, text) -> int:
    if not text.isdigit():
        raise FormatError(path, lineno, f"not a non-negative integer: {text!r}", col)
    return int(text)


def _tokens(path, lineno, first_col, fields) -> Tuple[str, ...]:
    if EPS not in fields:
        return tuple(fields)  # the reader already rejected empty and whitespace fields
    raise FormatError(path, lineno, f"{EPS} is reserved", first_col + fields.index(EPS))


# n-best

def parse_nbest(path: PathLike, system_id: str = None) -> List[NBestList]:
    grouped: Dict[str, List[Hypothesis]] = defaultdict(list)
    for lineno, fields in _records(path):
        if len(fields) < 2:
            raise FormatError(path, lineno, "expected '<utt-id> <score> <token>*'", len(fields) + 1)
        score = _float(path, lineno, 2, fields[1])
        grouped[fields[0]].append(Hypothesis(_tokens(path, lineno, 3, fields[2:]), score))
    return [NBestList(utt, tuple(hyps), system_id) for utt, hyps in sorted(grouped.items())]


def format_nbest(nbests: Iterable[NBestList]) -> str:
    lines = []
    for nb in sorted(nbests, key=lambda nb: nb.utterance_id):
        for h in nb.hypotheses:
            lines.append(" ".join([nb.utterance_id, f"{h.score:.17g}", *h.tokens]))
    return "".join(line + "\n" for line in lines)


def parse_aux(path: PathLike) -> Dict[str, Dict[int, float]]:
    aux: Dict[str, Dict[int, float]] = defaultdict(dict)
    for lineno, fields in _records(path):
        if len(fields) != 3:
            raise FormatError(path, lineno, "expected '<utt-id> <rank> <aux-score>'")
        rank = _int(path, lineno, 2, fields[1])
        if rank in aux[fields[0]]:
            raise FormatError(path, lineno, f"duplicate aux score for {fields[0]} rank {rank}")
        aux[fields[0]][rank] = _float(path, lineno, 3, fields[2])
    return dict(aux)


# references

def parse_reference(path: PathLike) -> Dict[str, Tuple[str, ...]]:
    refs: Dict[str, Tuple[str, ...]] = {}
    for lineno, fields in _records(path):
        utt = fields[0]
        if utt in refs:
            raise FormatError(path, lineno, f"duplicate utterance id {utt!r}", 1)
        refs[utt] = _tokens(path, lineno, 2, fields[1:])
    return refs


def format_reference(refs: Dict[str, Sequence[str]]) -> str:
    return "".join(" ".join([utt, *refs[utt]]) + "\n" for utt in sorted(refs))


# confident transcripts

def format_transcripts(transcripts: Iterable[ConfidentTranscript]) -> str:
    lines = []
    for tr in sorted(transcripts, key=lambda t: t.utterance_id):
        if not tr.words:
            lines.append(tr.utterance_id)
        for pos, w in enumerate(tr.words):
            lines.append(f"{tr.utterance_id} {pos} {w.token} {w.confidence:.6f}")
    return "".join(line + "\n" for line in lines)


def parse_transcripts(path: PathLike) -> List[ConfidentTranscript]:
    words: Dict[str, List[ConfidentWord]] = {}
    last_pos: Dict[str, int] = {}
    for lineno, fields in _records(path, skip_comments=False):
        utt = fields[0]
        if len(fields) == 1:
            if utt in words:
                raise FormatError(path, lineno, f"empty-transcript marker for {utt!r} repeats an utterance")
            words[utt] = []
            last_pos[utt] = None
            continue
        if len(fields) != 4:
            raise FormatError(path, lineno, "expected '<utt-id> <position> <word> <confidence>'")
        pos = _int(path, lineno, 2, fields[1])
        if utt in last_pos and (last_pos[utt] is None or pos <= last_pos[utt]):
            raise FormatError(path, lineno, f"position {pos} of {utt!r} is not increasing", 2)
        token = _tokens(path, lineno, 3, fields[2:3])[0]
        conf = _float(path, lineno, 4, fields[3])
        if not 0.0 < conf <= 1.0:
            raise FormatError(path, lineno, f"confidence {conf} outside (0, 1]", 4)
        words.setdefault(utt, []).append(ConfidentWord(token, conf))
        last_pos[utt] = pos
    return [ConfidentTranscript(utt, tuple(ws)) for utt, ws in sorted(words.items())]


# sausages

def format_sausages(networks: Iterable[ConfusionNetwork]) -> str:
    lines = []
    for cn in sorted(networks, key=lambda cn: cn.utterance_id):
        for b, posts in enumerate(normalize(cn)):
            for token, p in posts.items():
                lines.append(f"{cn.utterance_id} {b} {token} {p:.6f}")
    return "".join(line + "\n" for line in lines)


def parse_sausages(path: PathLike, tolerance: float = 5e-6) -> Dict[str, List[Dict[str, float]]]:
    """utterance id -> list of bins, each mapping token (or ``<eps>``) to posterior."""
    out: Dict[str, List[Dict[str, float]]] = {}
    for lineno, fields in _records(path, skip_comments=False):
        if len(fields) != 4:
            raise FormatError(path, lineno, "expected '<utt-id> <bin> <token> <posterior>'")
        utt, token = fields[0], fields[2]
        b = _int(path, lineno, 2, fields[1])
        bins = out.setdefault(utt, [])
        if b == len(bins):
            bins.append({})
        elif b != len(bins) - 1:
            raise FormatError(path, lineno, f"bin index {b} out of order for {utt!r}", 2)
        if token != EPS:
            _tokens(path, lineno, 3, [token])
        if token in bins[b]:
            raise FormatError(path, lineno, f"duplicate token {token!r} in bin {b}", 3)
        p = _float(path, lineno, 4, fields[3])
        if not 0.0 <= p <= 1.0:
            raise FormatError(path, lineno, f"posterior {p} outside [0, 1]", 4)
        bins[b][token] = p
    for utt, bins in out.items():
        for b, posts in enumerate(bins):
            if abs(math.fsum(posts.values()) - 1.0) > tolerance * max(1, len(posts)):
                raise HystocError(f"{path}: posteriors of {utt} bin {b} do not sum to 1")
    return dict(sorted(out.items()))


def write_text(path: PathLike, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
