"""The dependence-induced partial order over a trace, and two constant-size
summaries of it.

An event e is ordered before f when e precedes f in the log and their
labels are dependent, closed transitively.  Because equal labels are
always dependent, the order is generated by "immediate" edges from each
event back to the last prior occurrence of every dependent label.

Two streaming summaries let the order be queried without storing it:

* after sets: for a tracked event e, the set of labels of events so far
  that e is ordered before; membership of the arriving label decides
  causality in O(1).
* vector timestamps: per-thread counters whose pointwise comparison
  decides causality.  These require same-thread labels to be pairwise
  dependent (true for every thread-partition alphabet).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, MutableSequence, Sequence

from .core import ConcurrentAlphabet, Label, Trace


def immediate_predecessors(trace: Trace) -> list[list[int]]:
    """Per event, the ids of the last prior occurrence of each dependent label.

    The transitive closure of these edges is the full induced order.
    """
    dep_ids = trace.alphabet.dependent_label_ids()
    last: list[int | None] = [None] * len(trace.alphabet)
    preds: list[list[int]] = []
    for f, lbl in enumerate(trace.label_ids):
        preds.append([last[b] for b in dep_ids[lbl] if last[b] is not None])
        last[lbl] = f
    return preds


def ancestor_masks(trace: Trace, preds: list[list[int]] | None = None) -> list[int]:
    """For each event f, a bitmask of all events ordered at-or-before f.

    Intended for small-to-medium traces (memory is quadratic in bits).
    """
    if preds is None:
        preds = immediate_predecessors(trace)
    anc: list[int] = []
    for f in range(len(trace)):
        m = 1 << f
        for p in preds[f]:
            m |= anc[p]
        anc.append(m)
    return anc


def happens_before(trace: Trace, e: int, f: int) -> bool:
    """Definitional (reference) causality check: e at-or-before f in the
    induced order.  Quadratic; the streaming summaries are the fast path."""
    n = len(trace)
    if not (0 <= e < n and 0 <= f < n):
        raise IndexError(f"event id out of range: {e}, {f} (trace has {n} events)")
    if e == f:
        return True
    if e > f:
        return False
    preds = immediate_predecessors(trace)
    reach = [False] * (f + 1)
    reach[e] = True
    for x in range(e + 1, f + 1):
        reach[x] = any(p >= e and reach[p] for p in preds[x])
    return reach[f]


# ---------------------------------------------------------------------------
# After sets
# ---------------------------------------------------------------------------
# An after set is stored as an int bitmask over the alphabet's label indices.

def after_set_new(alphabet: ConcurrentAlphabet, label: Label) -> int:
    """The after set of an event at the moment it arrives: its own label."""
    return 1 << alphabet.index(label)


def after_set_step(alphabet: ConcurrentAlphabet, masks: MutableSequence[int],
                   label: Label) -> None:
    """Extend every tracked after set with the arriving event's label.

    A set grows iff it already contains some label dependent with the new
    one; this is exactly the incremental closure of the induced order.
    Updates in place.
    """
    li = alphabet.index(label)
    dep_mask = alphabet.dependence_masks()[li]
    bit = 1 << li
    for i, m in enumerate(masks):
        if m & dep_mask:
            masks[i] = m | bit


def afterset_causality(alphabet: ConcurrentAlphabet, mask: int, label: Label) -> bool:
    """With ``mask`` the after set of e in a prefix ending at f, this equals
    "e is ordered at-or-before f"."""
    return bool((mask >> alphabet.index(label)) & 1)


def after_set_labels(alphabet: ConcurrentAlphabet, mask: int) -> frozenset[Label]:
    """Decode a bitmask after set into labels (test/reporting helper)."""
    return frozenset(lab for i, lab in enumerate(alphabet.labels) if (mask >> i) & 1)


def definitional_after_set(trace: Trace, e: int, prefix_len: int) -> frozenset[Label]:
    """After set straight from the definition, as the oracle for the
    incremental update: labels of prefix events that e is ordered before."""
    return frozenset(trace.label(f) for f in range(prefix_len)
                     if f >= e and happens_before(trace, e, f))


# ---------------------------------------------------------------------------
# Vector timestamps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VectorClock:
    """Per-thread event counters; pointwise order mirrors causality."""

    threads: tuple[str, ...]
    counts: tuple[int, ...]

    @classmethod
    def bottom(cls, threads: Sequence[str]) -> "VectorClock":
        return cls(tuple(threads), (0,) * len(threads))

    def get(self, thread: str) -> int:
        return self.counts[self.threads.index(thread)]

    def leq(self, other: "VectorClock") -> bool:
        return vc_leq(self, other)

    def join(self, other: "VectorClock") -> "VectorClock":
        if self.threads != other.threads:
            raise ValueError("vector clocks over different thread sets")
        return VectorClock(self.threads,
                           tuple(max(a, b) for a, b in zip(self.counts, other.counts)))


def vc_leq(u: VectorClock, v: VectorClock) -> bool:
    """Componentwise comparison; equals causality between the stamped events."""
    if u.threads != v.threads:
        raise ValueError("vector clocks over different thread sets")
    return all(a <= b for a, b in zip(u.counts, v.counts))


class ClockStream:
    """Streaming computation of per-event vector timestamps.

    One clock per thread and one per label.  On an event by thread t: bump
    t's own entry, join in the clocks of the last occurrences of all
    cross-thread dependent labels, publish the result as the label's clock
    and the event's timestamp.  Same-thread label clocks never exceed the
    thread clock, so joining them would be a no-op and is skipped.
    """

    __slots__ = ("alphabet", "threads", "_tix", "_thread_clock", "_label_clock",
                 "_dep_other", "_label_thread")

    def __init__(self, alphabet: ConcurrentAlphabet):
        if not alphabet.same_thread_dependent():
            raise ValueError(
                "vector timestamps require same-thread labels to be pairwise dependent")
        self.alphabet = alphabet
        self.threads = alphabet.threads()
        self._tix = {t: i for i, t in enumerate(self.threads)}
        width = len(self.threads)
        self._thread_clock = [[0] * width for _ in self.threads]
        self._label_clock: list[tuple[int, ...] | None] = [None] * len(alphabet)
        self._label_thread = [self._tix[lab.thread] for lab in alphabet.labels]
        self._dep_other = [[b for b in deps if alphabet.labels[b].thread != alphabet.labels[a].thread]
                           for a, deps in enumerate(alphabet.dependent_label_ids())]

    def advance(self, label_id: int) -> tuple[int, ...]:
        """Consume one event, return its timestamp (a tuple over threads())."""
        t = self._label_thread[label_id]
        clock = self._thread_clock[t]
        clock[t] += 1
        for b in self._dep_other[label_id]:
            other = self._label_clock[b]
            if other is not None:
                for i, c in enumerate(other):
                    if c > clock[i]:
                        clock[i] = c
        stamp = tuple(clock)
        self._label_clock[label_id] = stamp
        return stamp


def vc_stream(trace: Trace) -> Iterator[VectorClock]:
    """Per-event vector timestamps, in trace order."""
    stream = ClockStream(trace.alphabet)
    threads = stream.threads
    for lbl in trace.label_ids:
        yield VectorClock(threads, stream.advance(lbl))
