"""Time the `confidences` command on a random-edit n-best corpus."""

import argparse
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from hystoc.formats import format_nbest, write_text
from hystoc.synthetic import perturbed_nbest


@dataclass
class BenchConfig:
    utterances: int = 1000
    depth: int = 100
    length: int = 30
    temperature: float = 1.0
    seed: int = 0


def run(cfg: BenchConfig) -> float:
    rng = np.random.default_rng(cfg.seed)
    nbests = [perturbed_nbest(rng, f"utt{u:05d}", cfg.length, cfg.depth)
              for u in range(cfg.utterances)]
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "nbest.txt"
        write_text(path, format_nbest(nbests))
        cmd = [sys.executable, "-m", "hystoc", "confidences", "--nbest", str(path),
               "--temperature", str(cfg.temperature), "--best", str(Path(tmp) / "best.txt")]
        subprocess.run(cmd, check=True)  # first run compiles and caches the kernels
        t0 = time.perf_counter()
        subprocess.run(cmd, check=True)
        return time.perf_counter() - t0


def main() -> None:
    d = BenchConfig()
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--utterances", type=int, default=d.utterances)
    parser.add_argument("--depth", type=int, default=d.depth)
    parser.add_argument("--length", type=int, default=d.length)
    parser.add_argument("--temperature", type=float, default=d.temperature)
    parser.add_argument("--seed", type=int, default=d.seed)
    args = parser.parse_args()
    cfg = BenchConfig(args.utterances, args.depth, args.length, args.temperature, args.seed)
    seconds = run(cfg)
    print(f"{cfg.utterances} utterances x {cfg.depth}-best x ~{cfg.length} tokens: "
          f"{seconds:.2f} s ({1000 * seconds / cfg.utterances:.2f} ms/utterance)")


if __name__ == "__main__":
    main()
