#!/usr/bin/env python3
"""Time per event of the vector-clock monitor as the thread count grows.

Every vector-clock operation is linear in the number of threads.  One op
conflicts with itself so that cross-thread joins actually occur; the
per-event cost should then rise monotonically with the thread count.
"""

import argparse
import random
import time

from patmon import (ConcurrentAlphabet, GeneralizedPattern, Label, Pattern,
                    Trace, run_monitor)


def no_match_pattern(dim: int) -> GeneralizedPattern:
    return GeneralizedPattern.of(Pattern.of_labels(
        [Label("ghost", f"never{i}") for i in range(dim)]))


def scaling_trace(threads: int, length: int, seed: int) -> Trace:
    rng = random.Random(seed)
    labels = [Label(f"t{t}", f"o{j}") for t in range(threads) for j in range(2)]
    alphabet = ConcurrentAlphabet.thread_partition(labels, [("o0", "o0")])
    return Trace.from_label_ids([rng.randrange(len(labels)) for _ in range(length)],
                                alphabet)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--threads", type=int, nargs="+", default=[5, 10, 20])
    ap.add_argument("--events", type=int, default=1_000_000)
    ap.add_argument("--seed", type=int, default=11)
    args = ap.parse_args()

    spec = no_match_pattern(3)
    print(f"{'threads':>8} {'wall_s':>8} {'us/event':>9}")
    for threads in args.threads:
        trace = scaling_trace(threads, args.events, args.seed)
        t0 = time.perf_counter()
        report = run_monitor(trace, spec, "vc")
        dt = time.perf_counter() - t0
        assert report.verdict == "NO_MATCH"
        print(f"{threads:>8} {dt:>8.3f} {dt / args.events * 1e6:>9.3f}")


if __name__ == "__main__":
    main()
