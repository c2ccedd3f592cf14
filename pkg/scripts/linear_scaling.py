#!/usr/bin/env python3
"""Wall time of the vector-clock monitor as the trace grows.

Runs the streaming engine on seeded random traces of increasing length
with a pattern that never matches (its labels are not in the alphabet),
so every event is processed.  Time per event should stay flat.
"""

import argparse
import time
from dataclasses import dataclass

from patmon import GeneralizedPattern, Label, Pattern, gen_random_trace, run_monitor


@dataclass
class Config:
    lengths: tuple[int, ...] = (100_000, 200_000, 400_000)
    threads: int = 4
    ops: int = 4
    dim: int = 3
    seed: int = 7


def no_match_pattern(dim: int) -> GeneralizedPattern:
    return GeneralizedPattern.of(Pattern.of_labels(
        [Label("ghost", f"never{i}") for i in range(dim)]))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lengths", type=int, nargs="+", default=list(Config.lengths))
    ap.add_argument("--threads", type=int, default=Config.threads)
    ap.add_argument("--ops", type=int, default=Config.ops)
    ap.add_argument("--seed", type=int, default=Config.seed)
    args = ap.parse_args()
    cfg = Config(tuple(args.lengths), args.threads, args.ops, seed=args.seed)

    spec = no_match_pattern(cfg.dim)
    print(f"{'events':>10} {'wall_s':>8} {'us/event':>9} {'entries':>8}")
    for length in cfg.lengths:
        trace, _ = gen_random_trace(cfg.threads, cfg.ops, length, cfg.seed)
        t0 = time.perf_counter()
        report = run_monitor(trace, spec, "vc")
        dt = time.perf_counter() - t0
        assert report.verdict == "NO_MATCH"
        print(f"{length:>10} {dt:>8.3f} {dt / length * 1e6:>9.3f} "
              f"{report.stats['peak_entries']:>8}")


if __name__ == "__main__":
    main()
