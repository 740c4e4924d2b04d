"""Confidence vs accuracy on the synthetic channel, across temperatures
and n-best depths. Prints one cohort table per setting."""

import argparse
from dataclasses import dataclass, field
from typing import List

import numpy as np

from hystoc import calibration_cohorts, extract_best, mark_correctness
from hystoc.synthetic import ChannelConfig, sample_corpus


@dataclass
class StudyConfig:
    utterances: int = 2000
    seed: int = 0
    cohort_size: int = 1500
    temperatures: List[float] = field(default_factory=lambda: [1.0, 3.0, 10.0])
    depths: List[int] = field(default_factory=lambda: [3, 10, 17, 100])


def run(cfg: StudyConfig) -> None:
    channel = ChannelConfig(corruptions=max(cfg.depths))
    refs, nbests = sample_corpus(cfg.utterances, cfg.seed, channel)
    depth_note = f"(at most {channel.corruptions} distinct corruptions per utterance)"
    print(f"{cfg.utterances} utterances, cohort size {cfg.cohort_size} {depth_note}")
    for temperature in cfg.temperatures:
        for depth in cfg.depths:
            scored = []
            for nb in nbests:
                tr = extract_best(nb, temperature, top_n=depth)
                scored.extend(mark_correctness(refs[nb.utterance_id], tr))
            cohorts = calibration_cohorts(scored, cfg.cohort_size)
            conf = np.array([c for c, _ in scored])
            hit = np.array([ok for _, ok in scored], dtype=float)
            print(f"\nT={temperature:g} depth={depth} tokens={len(scored)} "
                  f"mean-conf={conf.mean():.3f} accuracy={hit.mean():.3f}")
            for c in cohorts:
                print(f"  cohort {c.cohort_index}: median {c.median_confidence:.3f} "
                      f"accuracy {c.accuracy:.3f} n={c.count}")


def main() -> None:
    d = StudyConfig()
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--utterances", type=int, default=d.utterances)
    parser.add_argument("--seed", type=int, default=d.seed)
    parser.add_argument("--cohort-size", type=int, default=d.cohort_size)
    parser.add_argument("--temperatures", type=float, nargs="+", default=d.temperatures)
    parser.add_argument("--depths", type=int, nargs="+", default=d.depths)
    args = parser.parse_args()
    run(StudyConfig(args.utterances, args.seed, args.cohort_size, args.temperatures, args.depths))


if __name__ == "__main__":
    main()
