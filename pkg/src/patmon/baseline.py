"""Predictive monitoring against arbitrary NFA languages by ideal enumeration.

An ideal (downset) of the induced order collects the events some
reordering could have executed first.  Every ideal is identified by its
maximal antichain, whose size is bounded by the alphabet width, so a
trace has O(n^width) ideals.  For each ideal the engine accumulates the
NFA states reachable on some linearization; the trace predictively
matches iff the full ideal's state set touches an accepting state.

Exact but exponential in the width: this is the general-language engine
and the comparison baseline for the streaming monitor, and it converts
its inherent blow-up into a clean budget diagnostic.
"""

from __future__ import annotations

from typing import Iterator, Sequence

from .core import Nfa, Trace
from .monitor import MATCH, NO_MATCH, MatchReport
from .order import ancestor_masks, immediate_predecessors

DEFAULT_MAX_IDEALS = 10**7


class IdealBudgetError(RuntimeError):
    """Ideal enumeration exceeded its budget."""

    def __init__(self, created: int, budget: int):
        super().__init__(f"ideal budget exceeded: more than {budget} ideals "
                         f"({created} created)")
        self.created = created
        self.budget = budget


class _IdealSpace:
    """Shared geometry of a trace's ideals: immediate predecessor edges,
    their inverses, and per-event ancestor bitmasks for membership tests."""

    def __init__(self, trace: Trace):
        self.trace = trace
        self.n = len(trace)
        self.preds = immediate_predecessors(trace)
        self.anc = ancestor_masks(trace, self.preds)
        self.succs: list[list[int]] = [[] for _ in range(self.n)]
        for f, ps in enumerate(self.preds):
            for p in ps:
                self.succs[p].append(f)
        self.roots = tuple(e for e in range(self.n) if not self.preds[e])

    def member(self, e: int, key: tuple[int, ...]) -> bool:
        """Is event e in the downset identified by the antichain key?"""
        anc = self.anc
        return any((anc[m] >> e) & 1 for m in key)

    def downset_mask(self, key: tuple[int, ...]) -> int:
        m = 0
        for x in key:
            m |= self.anc[x]
        return m

    def extend_key(self, key: tuple[int, ...], e: int) -> tuple[int, ...]:
        """Maximal antichain after adding event e (all its predecessors are
        already inside, so e is maximal and shadows any covered maxima)."""
        anc_e = self.anc[e]
        return tuple(sorted([m for m in key if not (anc_e >> m) & 1] + [e]))

    def extensions_after(self, key: tuple[int, ...], ext: Sequence[int],
                         e: int) -> tuple[int, ...]:
        """Addable events of key+e, given the addable events of key."""
        out = [g for g in ext if g != e]
        for g in self.succs[e]:
            if all(p == e or self.member(p, key) for p in self.preds[g]):
                out.append(g)
        return tuple(sorted(out))


def minimal_extensions(trace: Trace, ideal_key: Sequence[int]) -> set[int]:
    """Events addable to the ideal: outside it, with every predecessor inside.

    ``ideal_key`` is the ideal's maximal antichain (event ids).  Raises
    ValueError when the key is not an antichain.
    """
    space = _IdealSpace(trace)
    key = tuple(sorted(ideal_key))
    for m in key:
        if not 0 <= m < space.n:
            raise ValueError(f"event id out of range in ideal key: {m}")
    for i, a in enumerate(key):
        for b in key[i + 1:]:
            if (space.anc[b] >> a) & 1 or (space.anc[a] >> b) & 1:
                raise ValueError(f"ideal key is not an antichain: {a} and {b} are ordered")
    inside = space.downset_mask(key)
    return {e for e in range(space.n)
            if not (inside >> e) & 1
            and all((inside >> p) & 1 for p in space.preds[e])}


def iter_ideal_keys(trace: Trace, max_ideals: int = DEFAULT_MAX_IDEALS) -> Iterator[tuple[int, ...]]:
    """All ideals of the trace as antichain keys, in order of ideal size."""
    space = _IdealSpace(trace)
    created = 1
    yield ()
    layer: dict[tuple[int, ...], tuple[int, ...]] = {(): space.roots}
    while layer:
        nxt: dict[tuple[int, ...], tuple[int, ...]] = {}
        for key, ext in layer.items():
            for e in ext:
                newkey = space.extend_key(key, e)
                if newkey in nxt:
                    continue
                created += 1
                if created > max_ideals:
                    raise IdealBudgetError(created, max_ideals)
                nxt[newkey] = space.extensions_after(key, ext, e)
                yield newkey
        layer = nxt


def ideal_count(trace: Trace, max_ideals: int = DEFAULT_MAX_IDEALS) -> int:
    """Exact number of ideals (downsets) of the induced order."""
    return sum(1 for _ in iter_ideal_keys(trace, max_ideals))


class _NfaStepper:
    """NFA transition function compiled against a trace alphabet, on
    state-set bitmasks."""

    def __init__(self, nfa: Nfa, trace: Trace):
        self.initial = _mask(nfa.initial)
        self.accepting = _mask(nfa.accepting)
        labels = trace.alphabet.labels
        table = [[0] * nfa.state_count for _ in labels]
        for t in nfa.transitions:
            for li, lab in enumerate(labels):
                if t.matches(lab):
                    table[li][t.src] |= 1 << t.dst
        self._table = table

    def step(self, states: int, label_id: int) -> int:
        row = self._table[label_id]
        out = 0
        while states:
            q = (states & -states).bit_length() - 1
            states &= states - 1
            out |= row[q]
        return out


def _mask(ids) -> int:
    m = 0
    for i in ids:
        m |= 1 << i
    return m


def run_baseline(trace: Trace, nfa: Nfa, *, early_exit: bool | None = None,
                 max_ideals: int = DEFAULT_MAX_IDEALS) -> MatchReport:
    """Ideal-enumeration predictive monitoring against an NFA language.

    Ideals are expanded in order of size; each is finalized only after all
    its immediate predecessors, with diamond re-derivations merged by key.
    ``early_exit`` returns MATCH at the first ideal whose state set meets
    an accepting state, with the ideal's size as the prefix analogue; it
    is only sound for suffix-closed NFAs (every accepting state loops on
    any symbol) and defaults to auto-detection of that shape.

    Raises :class:`IdealBudgetError` when more than ``max_ideals`` ideals
    are created.
    """
    suffix_closed = nfa.is_suffix_closed()
    if early_exit is None:
        early_exit = suffix_closed
    elif early_exit and not suffix_closed:
        raise ValueError("early exit requires a suffix-closed NFA "
                         "(every accepting state needs an any-symbol self-loop)")

    space = _IdealSpace(trace)
    stepper = _NfaStepper(nfa, trace)
    acc = stepper.accepting
    created = 1

    def report(verdict: str, consumed: int) -> MatchReport:
        return MatchReport(verdict, consumed,
                           stats={"ideals": created, "early_exit": early_exit,
                                  "engine": "baseline"})

    if early_exit and stepper.initial & acc:
        return report(MATCH, 0)

    # per layer: key -> [state set, addable events]
    layer: dict[tuple[int, ...], list] = {(): [stepper.initial, space.roots]}
    size = 0
    last = layer
    while layer:
        nxt: dict[tuple[int, ...], list] = {}
        for key, (states, ext) in layer.items():
            for e in ext:
                newkey = space.extend_key(key, e)
                reached = stepper.step(states, trace.label_ids[e])
                entry = nxt.get(newkey)
                if entry is not None:
                    entry[0] |= reached
                else:
                    created += 1
                    if created > max_ideals:
                        raise IdealBudgetError(created, max_ideals)
                    entry = [reached, space.extensions_after(key, ext, e)]
                    nxt[newkey] = entry
                if early_exit and entry[0] & acc:
                    return report(MATCH, size + 1)
        if nxt:
            last = nxt
        layer = nxt
        size += 1

    # the only extension-free ideal is the full one; its states decide
    (full_states, _), = last.values()
    verdict = MATCH if full_states & acc else NO_MATCH
    return report(verdict, len(trace))
