"""Instance generators: orthogonal-vector stress traces, random traces,
pattern sampling, and the adjacent-conflicting-access NFA.

The orthogonal-vectors encoding turns a k-sets-of-boolean-vectors
instance into a trace over k mutually independent partitions plus an NFA,
such that the trace predictively matches iff the instance has k vectors
with an all-zero pointwise product.  It gives ground-truthed hard inputs:
the trace's width is exactly k, and correctness is checkable against the
brute-force vector search.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import (ConcurrentAlphabet, Label, Nfa, Pattern, Trace, Transition)


@dataclass(frozen=True)
class OvInstance:
    """k groups of n boolean vectors over d dimensions."""

    k: int
    d: int
    n: int
    sets: tuple[tuple[tuple[int, ...], ...], ...]

    def __post_init__(self):
        if self.k < 2 or self.d < 1 or self.n < 1:
            raise ValueError("need k >= 2, d >= 1, n >= 1")
        if len(self.sets) != self.k:
            raise ValueError(f"expected {self.k} vector groups, got {len(self.sets)}")
        for group in self.sets:
            if len(group) != self.n:
                raise ValueError(f"each group must hold {self.n} vectors")
            for v in group:
                if len(v) != self.d or any(b not in (0, 1) for b in v):
                    raise ValueError(f"vectors must be boolean and {self.d}-dimensional")

    @classmethod
    def random(cls, k: int, d: int, n: int, seed: int, one_probability: float = 0.5) -> "OvInstance":
        rng = random.Random(seed)
        sets = tuple(tuple(tuple(int(rng.random() < one_probability) for _ in range(d))
                           for _ in range(n))
                     for _ in range(k))
        return cls(k, d, n, sets)


def ov_labels(k: int, d: int) -> tuple[list[list[Label]], list[Label]]:
    """Coordinate labels by partition and the per-partition separators."""
    coord = [[Label(f"p{i}", f"a{j}") for j in range(1, d + 1)] for i in range(1, k + 1)]
    seps = [Label(f"p{i}", "#") for i in range(1, k + 1)]
    return coord, seps


def gen_ov(instance: OvInstance) -> tuple[Trace, ConcurrentAlphabet, Nfa]:
    """Encode an orthogonal-vectors instance as (trace, alphabet, NFA).

    Partition i becomes thread ``p{i}``; within a partition everything is
    dependent (a thread), across partitions everything is independent, so
    the alphabet's width is exactly k.  Each vector contributes one
    coordinate label per zero entry followed by the partition separator;
    the NFA asks for a run of blocks, one per dimension, each drawing at
    least one coordinate label from any partition, between arbitrary
    prefixes and suffixes.
    """
    k, d, n = instance.k, instance.d, instance.n
    coord, seps = ov_labels(k, d)
    labels = [lab for part in coord for lab in part] + seps
    alphabet = ConcurrentAlphabet.thread_partition(labels)

    ids: list[int] = []
    for i in range(k):
        for vec in instance.sets[i]:
            for j in range(d):
                if vec[j] == 0:
                    ids.append(alphabet.index(coord[i][j]))
            ids.append(alphabet.index(seps[i]))
    trace = Trace.from_label_ids(ids, alphabet)

    # states 0..d; block j consumes one-or-more coordinate-j labels
    transitions = [Transition(0, None, 0), Transition(d, None, d)]
    for j in range(d):
        block = frozenset(coord[i][j] for i in range(k))
        transitions.append(Transition(j, block, j + 1))
        if j + 1 < d:
            transitions.append(Transition(j + 1, block, j + 1))
    nfa = Nfa(d + 1, frozenset({0}), frozenset({d}), tuple(transitions))
    return trace, alphabet, nfa


def gen_random_trace(threads: int, ops: int, length: int, seed: int,
                     conflict_probability: float = 0.2) -> tuple[Trace, ConcurrentAlphabet]:
    """Seed-deterministic random trace over a thread-partition alphabet.

    The alphabet is the full threads x ops label product; each unordered
    op pair (including an op with itself) conflicts with the given
    probability, making some cross-thread label pairs dependent.
    """
    if threads < 1 or ops < 1 or length < 1:
        raise ValueError("need threads, ops, length >= 1")
    rng = random.Random(seed)
    op_names = [f"o{i}" for i in range(ops)]
    conflicts = []
    for i in range(ops):
        for j in range(i, ops):
            if rng.random() < conflict_probability:
                conflicts.append((op_names[i], op_names[j]))
    labels = [Label(f"t{t}", op) for t in range(threads) for op in op_names]
    alphabet = ConcurrentAlphabet.thread_partition(labels, conflicts)
    ids = [rng.randrange(len(labels)) for _ in range(length)]
    return Trace.from_label_ids(ids, alphabet), alphabet


@dataclass(frozen=True)
class PatternSample:
    """A sampled pattern plus how it was drawn.

    ``window`` is the trace index range the locality policy drew from;
    ``fallback`` is set when the chosen window was shorter than the
    requested dimension and the whole trace was used instead.
    """

    pattern: Pattern
    policy: str
    window: tuple[int, int] | None = None
    fallback: bool = False


def locality_windows(length: int) -> list[tuple[int, int]]:
    """Up to 100 equal index windows that tile [0, length)."""
    parts = min(100, length)
    return [((length * p) // parts, (length * (p + 1)) // parts)
            for p in range(parts)]


def sample_pattern(trace: Trace, dim: int, policy: str, seed: int) -> PatternSample:
    """Draw a pattern from a trace's own events.

    ``locality`` splits the trace into up to 100 equal index windows,
    picks one, and samples the pattern's events inside it -- events far
    apart rarely participate in one bug.  ``diversity`` greedily spreads
    the sampled events over as many distinct threads as possible.  Labels
    are always listed in trace order.
    """
    if len(trace) == 0:
        raise ValueError("cannot sample a pattern from an empty trace")
    if not 1 <= dim <= len(trace):
        raise ValueError(f"dimension must be within 1..{len(trace)}")
    rng = random.Random(seed)

    if policy == "locality":
        windows = locality_windows(len(trace))
        start, end = windows[rng.randrange(len(windows))]
        window: tuple[int, int] | None = (start, end)
        fallback = end - start < dim
        if fallback:
            start, end = 0, len(trace)
        positions = sorted(rng.sample(range(start, end), dim))
        return PatternSample(_pattern_at(trace, positions), policy, window, fallback)

    if policy == "diversity":
        pools: dict[str, list[int]] = {}
        for i in range(len(trace)):
            pools.setdefault(trace.label(i).thread, []).append(i)
        threads = sorted(pools)
        rng.shuffle(threads)
        positions: list[int] = []
        while len(positions) < dim:
            for t in threads:
                if len(positions) >= dim:
                    break
                if pools[t]:
                    pick = rng.randrange(len(pools[t]))
                    positions.append(pools[t].pop(pick))
        positions.sort()
        return PatternSample(_pattern_at(trace, positions), policy)

    raise ValueError(f"unknown sampling policy: {policy!r}")


def _pattern_at(trace: Trace, positions: Sequence[int]) -> Pattern:
    return Pattern.of_labels([trace.label(i) for i in positions])


def race_nfa(threads: Iterable[str], variables: Iterable[str]) -> Nfa:
    """NFA for "some reordering puts two conflicting accesses back to back".

    Accepts words containing an adjacent pair of same-variable accesses by
    different threads, at least one of them a write.  Ops are the literal
    tokens ``w(x)`` / ``r(x)``.  Meant for the ideal-enumeration engine;
    adjacency cannot be expressed as a pattern.
    """
    threads = sorted(set(threads))
    variables = sorted(set(variables))
    if len(threads) < 2 or len(variables) < 1:
        raise ValueError("need at least two threads and one variable")

    transitions = [Transition(0, None, 0), Transition(1, None, 1)]
    state = 2
    for t in threads:
        for x in variables:
            others = [u for u in threads if u != t]
            after_write = frozenset(Label(u, f"{a}({x})") for u in others for a in ("w", "r"))
            after_read = frozenset(Label(u, f"w({x})") for u in others)
            transitions.append(Transition(0, Label(t, f"w({x})"), state))
            transitions.append(Transition(state, after_write, 1))
            state += 1
            transitions.append(Transition(0, Label(t, f"r({x})"), state))
            transitions.append(Transition(state, after_read, 1))
            state += 1
    return Nfa(state, frozenset({0}), frozenset({1}), tuple(transitions))
