"""Ground truth by brute force, for desk-scale instances.

Enumerates every linearization of the induced order (= every reordering
reachable by swapping adjacent independent events) and checks membership
directly.  Everything else in the package is validated against this.
"""

from __future__ import annotations

from typing import Iterator, Sequence

from .core import Trace, word_membership
from .order import immediate_predecessors

DEFAULT_LINEARIZATION_CAP = 10**6


class TruncatedEnumerationError(RuntimeError):
    """Enumeration hit its cap before the answer was decided."""


class LinearizationCursor:
    """Iterator over all linearizations of a trace's induced order.

    Yields event-id tuples in lexicographic id order, each exactly once.
    After (possibly partial) iteration, ``truncated`` tells whether the
    configured limit cut the enumeration short, and ``emitted`` how many
    linearizations were produced.
    """

    def __init__(self, trace: Trace, limit: int | None = None):
        self.trace = trace
        self.limit = limit
        self.truncated = False
        self.emitted = 0
        self._iter = self._enumerate()

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return self._iter

    def _enumerate(self) -> Iterator[tuple[int, ...]]:
        n = len(self.trace)
        preds = immediate_predecessors(self.trace)
        succs: list[list[int]] = [[] for _ in range(n)]
        indeg = [0] * n
        for f, ps in enumerate(preds):
            indeg[f] = len(ps)
            for p in ps:
                succs[p].append(f)

        chosen: list[int] = []
        # ready events kept sorted so emission order is lexicographic
        ready = sorted(e for e in range(n) if indeg[e] == 0)

        def backtrack() -> Iterator[tuple[int, ...]]:
            if len(chosen) == n:
                yield tuple(chosen)
                return
            for e in list(ready):
                ready.remove(e)
                chosen.append(e)
                opened = []
                for s in succs[e]:
                    indeg[s] -= 1
                    if indeg[s] == 0:
                        opened.append(s)
                ready.extend(opened)
                ready.sort()
                yield from backtrack()
                for s in opened:
                    ready.remove(s)
                for s in succs[e]:
                    indeg[s] += 1
                chosen.pop()
                ready.append(e)
                ready.sort()

        for lin in backtrack():
            if self.limit is not None and self.emitted >= self.limit:
                self.truncated = True
                return
            self.emitted += 1
            yield lin


def all_linearizations(trace: Trace, limit: int | None = None) -> LinearizationCursor:
    """Every topological order of the induced partial order.

    Intended for traces of ~10 events or fewer; pass ``limit`` to cap the
    enumeration (the cursor flags truncation rather than raising).
    """
    return LinearizationCursor(trace, limit)


def predictive_membership_bruteforce(trace: Trace, spec,
                                     limit: int | None = DEFAULT_LINEARIZATION_CAP) -> bool:
    """Does some reordering of the trace belong to the language?

    Reference answer by exhaustive linearization.  Raises
    :class:`TruncatedEnumerationError` if the cap was hit before a
    witness was found -- a truncated "no" is not trustworthy.
    """
    cursor = all_linearizations(trace, limit)
    labs = trace.alphabet.labels
    ids = trace.label_ids
    for lin in cursor:
        word = [labs[ids[e]] for e in lin]
        if word_membership(spec, word):
            return True
    if cursor.truncated:
        raise TruncatedEnumerationError(
            f"no witness within the first {cursor.emitted} linearizations")
    return False


def ov_bruteforce(sets: Sequence[Sequence[Sequence[int]]]) -> bool:
    """Orthogonal-vectors decision by full enumeration.

    ``sets`` holds k groups of boolean d-vectors; answer is True iff one
    vector can be chosen from each group with an all-zero pointwise
    product (equivalently: every coordinate is zeroed by some choice).
    """
    import itertools

    for choice in itertools.product(*sets):
        d = len(choice[0])
        if all(any(v[j] == 0 for v in choice) for j in range(d)):
            return True
    return False
