"""Command-line entry point.

Exit status: 0 success, 1 usage error, 2 data or contract error.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from typing import List, Optional

from hystoc.confnet import (
    Bin,
    ConfusionNetwork,
    RescoreWeights,
    build_confusion_network,
    extract_best,
    rescore,
    transcript_from_network,
)
from hystoc.core import HystocError
from hystoc.evaluation import calibration_cohorts, corpus_wer, mark_correctness
from hystoc.formats import (
    format_nbest,
    format_sausages,
    format_transcripts,
    parse_aux,
    parse_nbest,
    parse_reference,
    parse_transcripts,
    write_text,
)
from hystoc.fusion import FusionScheme, RoverParams, hystoc_fuse, rover_fuse


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _emit(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        write_text(path, text)


def _check_shared(groups, paths) -> List[str]:
    ids = [set(g) for g in groups]
    union = set().union(*ids)
    problems = []
    for path, have in zip(paths, ids):
        missing = sorted(union - have)
        if missing:
            problems.append(f"{path} lacks {' '.join(missing)}")
    if problems:
        raise HystocError("inputs do not share a segmentation: " + "; ".join(problems))
    return sorted(union)


def cmd_confidences(args) -> None:
    transcripts, networks = [], []
    for nb in parse_nbest(args.nbest):
        if args.temperature == 0:
            tr = extract_best(nb, 0.0)
            if args.sausage:
                networks.append(ConfusionNetwork(
                    nb.utterance_id, tuple(Bin({t: 0.0}) for t in tr.tokens), 0.0, 0.0))
        else:
            cn = build_confusion_network(nb, args.temperature, args.top_n)
            tr = transcript_from_network(cn)
            networks.append(cn)
        transcripts.append(tr)
    if args.sausage:
        write_text(args.sausage, format_sausages(networks))
    _emit(args.best, format_transcripts(transcripts))


def cmd_rescore(args) -> None:
    aux = parse_aux(args.aux)
    weights = RescoreWeights(args.lm_weight, args.insertion_bonus, args.am_weight)
    nbests = parse_nbest(args.nbest)
    known = {nb.utterance_id for nb in nbests}
    extra = sorted(set(aux) - known)
    if extra:
        raise HystocError(f"aux scores for unknown utterances: {' '.join(extra)}")
    out = []
    for nb in nbests:
        scores = aux.get(nb.utterance_id, {})
        extra_ranks = sorted(r for r in scores if r >= len(nb))
        if extra_ranks:
            raise HystocError(f"utterance {nb.utterance_id}: aux rank {extra_ranks[0]} "
                              f"beyond its {len(nb)} hypotheses")
        out.append(rescore(nb, scores, weights))
    sys.stdout.write(format_nbest(out))


def cmd_fuse_rover(args) -> None:
    systems = [{tr.utterance_id: tr for tr in parse_transcripts(p)} for p in args.inputs]
    params = RoverParams(args.alpha, args.eps_conf)
    fused = [rover_fuse([s[utt] for s in systems], params)
             for utt in _check_shared(systems, args.inputs)]
    _emit(args.out, format_transcripts(fused))


def cmd_fuse_hystoc(args) -> None:
    systems = [{nb.utterance_id: nb for nb in parse_nbest(p, system_id=str(k))}
               for k, p in enumerate(args.inputs)]
    scheme = FusionScheme(args.scheme)
    networks, transcripts = [], []
    for utt in _check_shared(systems, args.inputs):
        cn, tr = hystoc_fuse([s[utt] for s in systems], scheme, args.temperature)
        networks.append(cn)
        transcripts.append(tr)
    if args.sausage:
        write_text(args.sausage, format_sausages(networks))
    _emit(args.best, format_transcripts(transcripts))


def _read_hyps(path, fmt):
    if fmt == "conf":
        return {tr.utterance_id: tr.tokens for tr in parse_transcripts(path)}
    return parse_reference(path)


def cmd_wer(args) -> None:
    report = corpus_wer(parse_reference(args.ref), _read_hyps(args.hyp, args.hyp_format))
    print(f"WER {100 * report.wer:.2f} {report.substitutions} {report.deletions} "
          f"{report.insertions} {report.ref_words}")


def cmd_calibration(args) -> None:
    refs = parse_reference(args.ref)
    scored = []
    for tr in parse_transcripts(args.best):
        if tr.utterance_id not in refs:
            raise HystocError(f"no reference for utterance {tr.utterance_id}")
        scored.extend(mark_correctness(refs[tr.utterance_id], tr))
    cohorts = calibration_cohorts(scored, args.cohort_size)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["cohort", "median_confidence", "accuracy", "count"])
    for c in cohorts:
        writer.writerow([c.cohort_index, f"{c.median_confidence:.6f}", f"{c.accuracy:.6f}", c.count])
    _emit(args.out, buf.getvalue())


def _non_negative(text):
    value = float(text)
    if not value >= 0:
        raise argparse.ArgumentTypeError(f"must be >= 0: {text}")
    return value


def _positive(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0: {text}")
    return value


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer: {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hystoc", description="Word confidences and fusion from n-best lists.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("confidences", help="best path with word posteriors")
    p.add_argument("--nbest", required=True)
    p.add_argument("--temperature", type=_non_negative, required=True)
    p.add_argument("--top-n", type=_positive_int)
    p.add_argument("--sausage", help="write per-bin posteriors here")
    p.add_argument("--best", help="confident transcript output (default: stdout)")
    p.set_defaults(func=cmd_confidences)

    p = sub.add_parser("rescore", help="fold LM scores and insertion bonus into n-best scores")
    p.add_argument("--nbest", required=True)
    p.add_argument("--aux", required=True)
    p.add_argument("--lm-weight", type=_non_negative, required=True)
    p.add_argument("--insertion-bonus", type=float, required=True)
    p.add_argument("--am-weight", type=_non_negative, default=1.0)
    p.set_defaults(func=cmd_rescore)

    p = sub.add_parser("fuse-rover", help="confidence-weighted voting over transcripts")
    p.add_argument("--in", dest="inputs", action="append", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--eps-conf", type=float, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fuse_rover)

    p = sub.add_parser("fuse-hystoc", help="pool n-best lists into one confusion network")
    p.add_argument("--in", dest="inputs", action="append", required=True)
    p.add_argument("--scheme", choices=[s.value for s in FusionScheme], required=True)
    p.add_argument("--temperature", type=_positive, default=1.0)
    p.add_argument("--sausage")
    p.add_argument("--best", required=True)
    p.set_defaults(func=cmd_fuse_hystoc)

    p = sub.add_parser("wer", help="corpus word error rate")
    p.add_argument("--ref", required=True)
    p.add_argument("--hyp", required=True)
    p.add_argument("--hyp-format", choices=["text", "conf"], default="text",
                   help="'text': reference-style lines; 'conf': confident transcript")
    p.set_defaults(func=cmd_wer)

    p = sub.add_parser("calibration", help="median confidence vs accuracy per cohort")
    p.add_argument("--ref", required=True)
    p.add_argument("--best", required=True)
    p.add_argument("--cohort-size", type=_positive_int, default=2500)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_calibration)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    try:
        args.func(args)
    except (HystocError, OSError) as exc:
        print(f"hystoc: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
