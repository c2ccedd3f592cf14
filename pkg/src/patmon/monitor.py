"""Constant-space streaming predictive monitoring against patterns.

The question answered here: can the logged execution be reordered, by
commuting adjacent independent events, into a word that matches the
pattern?  The monitor processes each event once and keeps, per "key" (a
permutation of a sub-multiset of the pattern's labels), only the slotwise
latest tuple of events that could still realize the pattern.  The number
of keys is a function of the pattern dimension alone, so memory never
grows with the trace.

A tuple of events, listed in trace order, is *admissible* for a target
label sequence when some equivalent reordering arranges it in target
order.  That holds exactly when no pair that the target flips is ordered
by the induced partial order, which each engine decides from its summary:
after sets (label bitmask per slot) or frozen vector timestamps.
"""

from __future__ import annotations

import heapq
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .core import (ConcurrentAlphabet, EmptyLang, EpsilonLang, Event,
                   GeneralizedPattern, Label, Pattern, Trace, expand_pattern)
from .order import ClockStream, immediate_predecessors

MATCH = "MATCH"
NO_MATCH = "NO_MATCH"


@dataclass(frozen=True)
class Witness:
    """Evidence for a MATCH: which disjunct fired, the matched events (in
    trace order), and optionally a full reordered prefix realizing it."""

    disjunct: int
    events: tuple[int, ...]
    reordering: tuple[int, ...] | None = None


@dataclass(frozen=True)
class MatchReport:
    verdict: str
    events_processed: int
    witness: Witness | None = None
    stats: dict = field(default_factory=dict)

    @property
    def matched(self) -> bool:
        return self.verdict == MATCH


@dataclass(frozen=True)
class CandidateTuple:
    """Events in trace order whose labels form part of a pattern."""

    ids: tuple[int, ...]
    labels: tuple[Label, ...]

    def __post_init__(self):
        if len(self.ids) != len(self.labels):
            raise ValueError("ids and labels must have equal length")
        if any(a >= b for a, b in zip(self.ids, self.ids[1:])):
            raise ValueError("event ids must be strictly increasing")


def tuple_join(t1: CandidateTuple, t2: CandidateTuple) -> CandidateTuple:
    """Slotwise later event.  Admissible same-key tuples are closed under this."""
    if t1.labels != t2.labels:
        raise ValueError("tuples have different label sequences")
    return CandidateTuple(tuple(max(a, b) for a, b in zip(t1.ids, t2.ids)), t1.labels)


def tuple_leq(t1: CandidateTuple, t2: CandidateTuple) -> bool:
    """Slotwise at-or-before."""
    if t1.labels != t2.labels:
        raise ValueError("tuples have different label sequences")
    return all(a <= b for a, b in zip(t1.ids, t2.ids))


def sort_to_target(labels: Sequence, target: Sequence) -> tuple[int, ...]:
    """Rank of each slot after stably rearranging into target label order.

    ``labels`` lists the slots in trace order; the result maps slot index
    to its position in the rearranged tuple.  Slots with equal labels keep
    their trace order.  Raises ValueError when the multisets differ.
    """
    queues: dict = {}
    for i, lab in enumerate(labels):
        queues.setdefault(lab, []).append(i)
    positions = [-1] * len(labels)
    for rank, lab in enumerate(target):
        q = queues.get(lab)
        if not q:
            raise ValueError(f"target label {lab!r} not available in tuple")
        positions[q.pop(0)] = rank
    if any(q for q in queues.values()):
        raise ValueError("tuple has labels not consumed by the target")
    return tuple(positions)


def target_subsequence(pattern_labels: Sequence, key_labels: Sequence) -> tuple:
    """The pattern subsequence a key is matched against.

    For each label, the key's occurrences claim the leftmost pattern
    positions carrying that label; the target reads those positions in
    pattern order.  This is exactly the arrangement a stable sort of any
    complete tuple would induce on the key's slots.
    """
    want = Counter(key_labels)
    taken: list = []
    seen: Counter = Counter()
    for lab in pattern_labels:
        if seen[lab] < want.get(lab, 0):
            seen[lab] += 1
            taken.append(lab)
    if sum(want.values()) != len(taken):
        raise ValueError("key is not a sub-multiset of the pattern labels")
    return tuple(taken)


def check_admissible(trace: Trace, event_ids: Sequence[int], target: Sequence[Label]) -> bool:
    """Single-pass admissibility check for one candidate tuple.

    Maintains after sets only for the tuple's events.  When a tuple event
    f arrives, any earlier slot e that the target places after f must not
    be ordered before f; the after set of e decides that in O(1).
    """
    n = len(trace)
    ids = list(event_ids)
    if any(not 0 <= e < n for e in ids):
        raise IndexError("tuple event id outside the trace")
    if any(a >= b for a, b in zip(ids, ids[1:])):
        raise ValueError("tuple events must be listed in trace order")
    labels = [trace.label(e) for e in ids]
    rank = dict(zip(ids, sort_to_target(labels, target)))

    alphabet = trace.alphabet
    dep_masks = alphabet.dependence_masks()
    members = set(ids)
    masks: dict[int, int] = {}
    last = max(ids, default=-1)
    for f in range(last + 1):
        flbl = trace.label_ids[f]
        fdep = dep_masks[flbl]
        fbit = 1 << flbl
        for e, m in masks.items():
            if m & fdep:
                masks[e] = m | fbit
        if f in members:
            masks[f] = fbit
            rf = rank[f]
            for e, m in masks.items():
                if rank[e] > rf and (m >> flbl) & 1:
                    return False
    return True


# ---------------------------------------------------------------------------
# Streaming engines
# ---------------------------------------------------------------------------

class _PatternMonitorBase:
    """Key bookkeeping shared by both engines.

    ``table`` maps each key (tuple of label indices, in arrival order) to
    the slotwise-latest admissible tuple with that label sequence, stored
    as parallel event-id and summary tuples.  The empty key is always
    present so length-1 extensions have a parent.
    """

    def __init__(self, alphabet: ConcurrentAlphabet, pattern: Sequence[Label], disjunct: int = 0):
        if len(pattern) == 0:
            raise ValueError("streaming monitor needs dimension >= 1 (dimension 0 matches trivially)")
        self.alphabet = alphabet
        self.disjunct = disjunct
        self.pattern_labels = tuple(pattern)
        unknown: dict[Label, int] = {}
        ids = []
        for lab in self.pattern_labels:
            li = alphabet.find(lab)
            if li is None:
                # labels outside the alphabet can never be matched; give them
                # stable negative ids so duplicate occurrences still align
                li = unknown.setdefault(lab, -1 - len(unknown))
            ids.append(li)
        self.pattern_ids = tuple(ids)
        self.dimension = len(ids)
        self._label_of = dict(zip(self.pattern_ids, self.pattern_labels))
        self._limit = Counter(self.pattern_ids)
        pos_by_label: dict[int, list[int]] = {}
        for pos, li in enumerate(self.pattern_ids):
            pos_by_label.setdefault(li, []).append(pos)
        self._pos_by_label = pos_by_label
        self._rank_cache: dict[tuple[int, ...], tuple[int, ...]] = {(): ()}
        self.events_processed = 0
        self.matched: tuple[int, ...] | None = None
        # key -> (event ids, summaries)
        self.table: dict[tuple[int, ...], tuple[tuple[int, ...], list]] = {(): ((), [])}

    def _ranks(self, key: tuple[int, ...]) -> tuple[int, ...]:
        """Pattern position claimed by each slot of the key (stable order:
        a label's i-th occurrence in the key takes its i-th pattern slot)."""
        ranks = self._rank_cache.get(key)
        if ranks is None:
            seen: Counter = Counter()
            out = []
            for li in key:
                out.append(self._pos_by_label[li][seen[li]])
                seen[li] += 1
            ranks = tuple(out)
            self._rank_cache[key] = ranks
        return ranks

    def key_target(self, key: tuple[int, ...]) -> tuple[Label, ...]:
        """Target label sequence for a key (testing/reporting helper)."""
        return target_subsequence(self.pattern_labels,
                                  tuple(self._label_of[li] for li in key))

    def live_entries(self) -> int:
        return len(self.table)


class AfterSetMonitor(_PatternMonitorBase):
    """Streaming monitor for one concrete pattern using after-set summaries."""

    def step(self, fid: int, flbl: int) -> bool:
        """Consume one event (id and label index); True once a complete
        admissible tuple exists."""
        self.events_processed += 1
        dep_masks = self.alphabet.dependence_masks()
        fdep = dep_masks[flbl]
        fbit = 1 << flbl
        table = self.table
        for _ids, masks in table.values():
            for i, m in enumerate(masks):
                if m & fdep:
                    masks[i] = m | fbit

        if not self._limit.get(flbl):
            return self.matched is not None

        for key, (ids, masks) in list(table.items()):
            if len(key) >= self.dimension or key.count(flbl) >= self._limit[flbl]:
                continue
            newkey = key + (flbl,)
            ranks = self._ranks(newkey)
            frank = ranks[-1]
            ok = True
            for i, m in enumerate(masks):
                # a slot the target places after f must not be ordered before f
                if ranks[i] > frank and (m >> flbl) & 1:
                    ok = False
                    break
            if ok:
                table[newkey] = (ids + (fid,), masks.copy() + [fbit])
                if len(newkey) == self.dimension and self.matched is None:
                    self.matched = ids + (fid,)
        return self.matched is not None


class VectorClockMonitor(_PatternMonitorBase):
    """Streaming monitor for one concrete pattern using vector timestamps.

    Slot summaries are the timestamps captured when the slot's event
    arrived; they are never updated afterwards.  The flipped-pair test
    becomes a pointwise clock comparison.
    """

    def step(self, fid: int, flbl: int, stamp: tuple[int, ...]) -> bool:
        self.events_processed += 1
        if not self._limit.get(flbl):
            return self.matched is not None
        table = self.table
        for key, (ids, clocks) in list(table.items()):
            if len(key) >= self.dimension or key.count(flbl) >= self._limit[flbl]:
                continue
            newkey = key + (flbl,)
            ranks = self._ranks(newkey)
            frank = ranks[-1]
            ok = True
            for i, clock in enumerate(clocks):
                if ranks[i] > frank and all(a <= b for a, b in zip(clock, stamp)):
                    ok = False
                    break
            if ok:
                table[newkey] = (ids + (fid,), clocks + [stamp])
                if len(newkey) == self.dimension and self.matched is None:
                    self.matched = ids + (fid,)
        return self.matched is not None


def stream_step(state: AfterSetMonitor, event: Event) -> bool:
    """Feed one event to an after-set monitor; True when complete."""
    return state.step(event.id, state.alphabet.index(event.label))


def vc_monitor_step(state: VectorClockMonitor, event: Event,
                    stamp: tuple[int, ...]) -> bool:
    """Feed one event (with its timestamp from the co-advanced clock
    stream) to a vector-clock monitor; True when complete."""
    return state.step(event.id, state.alphabet.index(event.label), stamp)


# ---------------------------------------------------------------------------
# Witness extraction
# ---------------------------------------------------------------------------

def witness_reordering(trace: Trace, event_ids: Sequence[int], target: Sequence[Label],
                       prefix_len: int | None = None) -> tuple[int, ...]:
    """A linearization of the consumed prefix that realizes the match.

    Topologically sorts the prefix's order graph with the tuple's target
    arrangement added as chain edges; ties break toward the smallest event
    id, so the output is deterministic.  A cycle here would contradict
    admissibility and raises.
    """
    ids = list(event_ids)
    if prefix_len is None:
        prefix_len = (max(ids) + 1) if ids else 0
    labels = [trace.label(e) for e in ids]
    ranks = sort_to_target(labels, target)
    order = [e for _, e in sorted(zip(ranks, ids))]

    preds = immediate_predecessors(trace)
    succs: list[list[int]] = [[] for _ in range(prefix_len)]
    indeg = [0] * prefix_len
    for f in range(prefix_len):
        for p in preds[f]:
            succs[p].append(f)
            indeg[f] += 1
    for u, v in zip(order, order[1:]):
        succs[u].append(v)
        indeg[v] += 1

    heap = [e for e in range(prefix_len) if indeg[e] == 0]
    heapq.heapify(heap)
    out: list[int] = []
    while heap:
        e = heapq.heappop(heap)
        out.append(e)
        for s in succs[e]:
            indeg[s] -= 1
            if indeg[s] == 0:
                heapq.heappush(heap, s)
    if len(out) != prefix_len:
        raise RuntimeError("cycle while linearizing an admissible tuple; this is a bug")
    return tuple(out)


# ---------------------------------------------------------------------------
# Driver
# ---------------------------------------------------------------------------

def run_monitor(trace: Trace, spec, engine: str = "vc", *,
                expansion_cap: int = 1024, want_reordering: bool = True,
                checkpoint_every: int = 0,
                on_checkpoint: Callable[[int, int], None] | None = None) -> MatchReport:
    """Predictive monitoring of a trace against a (generalized) pattern.

    Runs one streaming monitor per expanded pattern disjunct, all in
    lockstep, and reports the earliest prefix at which any of them holds a
    complete admissible tuple.  ``engine`` selects the summary kind:
    ``"afterset"`` or ``"vc"`` (both decide identically).

    The empty-word disjunct matches only the empty trace; a dimension-0
    pattern matches everything at prefix 0.
    """
    if isinstance(spec, Pattern):
        spec = GeneralizedPattern.of(spec)
    if not isinstance(spec, GeneralizedPattern):
        raise TypeError("monitor expects a Pattern or GeneralizedPattern")
    if engine not in ("afterset", "vc"):
        raise ValueError(f"unknown engine: {engine!r}")

    concrete: list[tuple[int, tuple[Label, ...]]] = []
    zero_match_disjunct: int | None = None
    for di, d in enumerate(spec.disjuncts):
        if isinstance(d, EmptyLang):
            continue
        if isinstance(d, EpsilonLang):
            if len(trace) == 0 and zero_match_disjunct is None:
                zero_match_disjunct = di
            continue
        for q in expand_pattern(d, expansion_cap):
            if q.dimension == 0:
                if zero_match_disjunct is None:
                    zero_match_disjunct = di
            else:
                concrete.append((di, q.label_sequence()))

    stats = {"engine": engine, "patterns": len(concrete), "peak_entries": 0}
    if zero_match_disjunct is not None:
        return MatchReport(MATCH, 0, Witness(zero_match_disjunct, (), ()), stats)

    alphabet = trace.alphabet
    if engine == "vc":
        states = [VectorClockMonitor(alphabet, labs, di) for di, labs in concrete]
        clocks: ClockStream | None = ClockStream(alphabet)
    else:
        states = [AfterSetMonitor(alphabet, labs, di) for di, labs in concrete]
        clocks = None

    peak = sum(st.live_entries() for st in states)
    hit: _PatternMonitorBase | None = None
    processed = 0
    for fid, flbl in enumerate(trace.label_ids):
        stamp = clocks.advance(flbl) if clocks is not None else None
        for st in states:
            done = st.step(fid, flbl) if stamp is None else st.step(fid, flbl, stamp)
            if done and hit is None:
                hit = st
        processed = fid + 1
        entries = sum(st.live_entries() for st in states)
        if entries > peak:
            peak = entries
        if checkpoint_every and on_checkpoint and processed % checkpoint_every == 0:
            on_checkpoint(processed, entries)
        if hit is not None:
            break

    stats["peak_entries"] = peak
    if hit is None:
        return MatchReport(NO_MATCH, processed, None, stats)
    reordering = None
    if want_reordering:
        reordering = witness_reordering(trace, hit.matched, hit.pattern_labels, processed)
    return MatchReport(MATCH, processed,
                       Witness(hit.disjunct, hit.matched, reordering), stats)
