#!/usr/bin/env python3
"""The ideal-enumeration engine versus the streaming monitor on one input.

On a 3-thread no-match trace the ideal count grows cubically, so the
baseline hits its budget while the streaming engine finishes in
milliseconds on the same events.
"""

import argparse
import time

from patmon import (GeneralizedPattern, IdealBudgetError, Label, Pattern,
                    gen_random_trace, run_baseline, run_monitor)
from patmon.core import gp_to_nfa


def no_match_pattern(dim: int) -> GeneralizedPattern:
    return GeneralizedPattern.of(Pattern.of_labels(
        [Label("ghost", f"never{i}") for i in range(dim)]))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--events", type=int, default=3000)
    ap.add_argument("--threads", type=int, default=3)
    ap.add_argument("--budget", type=int, default=1_000_000)
    ap.add_argument("--seed", type=int, default=23)
    args = ap.parse_args()

    trace, _ = gen_random_trace(args.threads, 3, args.events, args.seed,
                                conflict_probability=0.0)
    spec = no_match_pattern(3)

    t0 = time.perf_counter()
    report = run_monitor(trace, spec, "vc")
    print(f"streaming monitor: {report.verdict} in {time.perf_counter() - t0:.3f}s")

    t0 = time.perf_counter()
    try:
        run_baseline(trace, gp_to_nfa(spec), max_ideals=args.budget)
        print("baseline finished within budget (trace too easy?)")
    except IdealBudgetError as exc:
        print(f"baseline: {exc} after {time.perf_counter() - t0:.3f}s")


if __name__ == "__main__":
    main()
