"""Fuse synthetic systems with Rover and with the three pooling schemes.

Each system sees the same references through its own channel draw, and
its scores carry a private offset. Corpus WER is printed per method.
"""

import argparse
from dataclasses import dataclass

import numpy as np

from hystoc import (
    FusionScheme,
    Hypothesis,
    NBestList,
    RoverParams,
    corpus_wer,
    extract_best,
    hystoc_fuse,
    rover_fuse,
)
from hystoc.synthetic import ChannelConfig, corrupt, sample_reference


@dataclass
class DemoConfig:
    utterances: int = 500
    systems: int = 3
    offset_scale: float = 20.0
    seed: int = 0


def run(cfg: DemoConfig) -> None:
    rng = np.random.default_rng(cfg.seed)
    channel = ChannelConfig()
    offsets = rng.uniform(-cfg.offset_scale, cfg.offset_scale, size=cfg.systems)
    refs, per_system = {}, [[] for _ in range(cfg.systems)]
    for u in range(cfg.utterances):
        utt = f"utt{u:05d}"
        reference = sample_reference(rng, channel)
        refs[utt] = tuple(f"w{w}" for w in reference.tolist())
        for k in range(cfg.systems):
            nb = corrupt(rng, channel, reference, utt)
            per_system[k].append(NBestList(utt, tuple(Hypothesis(h.tokens, h.score + offsets[k])
                                                      for h in nb), str(k)))

    singles = [[extract_best(nb, 1.0) for nb in system] for system in per_system]
    for k, trs in enumerate(singles):
        _report(f"system {k}", refs, trs)
    _report("rover", refs, [rover_fuse([s[u] for s in singles], RoverParams(0.5, 0.5))
                            for u in range(cfg.utterances)])
    for scheme in FusionScheme:
        _report(f"hystoc {scheme.value}", refs,
                [hystoc_fuse([s[u] for s in per_system], scheme)[1] for u in range(cfg.utterances)])


def _report(name, refs, transcripts):
    report = corpus_wer(refs, {t.utterance_id: t.tokens for t in transcripts})
    print(f"{name:24s} WER {100 * report.wer:6.2f}")


def main() -> None:
    d = DemoConfig()
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--utterances", type=int, default=d.utterances)
    parser.add_argument("--systems", type=int, default=d.systems)
    parser.add_argument("--offset-scale", type=float, default=d.offset_scale)
    parser.add_argument("--seed", type=int, default=d.seed)
    args = parser.parse_args()
    run(DemoConfig(args.utterances, args.systems, args.offset_scale, args.seed))


if __name__ == "__main__":
    main()
