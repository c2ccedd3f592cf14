"""Domain model: labels, concurrent alphabets, traces, patterns, and NFAs.

A concurrent alphabet pairs a finite label set with a symmetric irreflexive
independence relation.  Adjacent events with independent labels may be
commuted without changing the behaviour of the program that produced the
log; everything in this package is built on top of that relation.

Patterns are subsequence specifications: a pattern of dimension d matches
any word that contains its d labels in order (with arbitrary gaps).  The
pattern algebra below (union / concatenation / intersection / star) keeps
results inside the generalized-pattern class.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Hashable, Iterable, Iterator, NamedTuple, Sequence

# Pattern and NFA machinery is agnostic to what a symbol is, as long as it
# hashes; traces always use Label symbols.
Symbol = Hashable


class Label(NamedTuple):
    """An event label: acting thread and the operation it performed.

    Both components are opaque tokens; op structure such as ``w(x)`` is
    never parsed.  Labels order lexicographically, which is used only for
    canonicalization (stable expansion order, serialization).
    """

    thread: str
    op: str


class Event(NamedTuple):
    """A unique occurrence of a label; ``id`` is the position in the trace."""

    id: int
    label: Label


class UnknownLabelError(ValueError):
    """A label was used that is not part of the alphabet."""


class ExpansionCapError(ValueError):
    """Expanding per-position label sets would exceed the configured cap."""


def _unordered(a, b) -> frozenset:
    return frozenset((a, b))


def _pair_tuples(pair_sets: Iterable[frozenset]) -> list[tuple]:
    """Unordered pairs (possibly singleton sets) back to 2-tuples."""
    out = []
    for p in pair_sets:
        items = sorted(p)
        out.append((items[0], items[-1]))
    return out


class ConcurrentAlphabet:
    """A finite label set plus an irreflexive symmetric independence relation.

    Two representations are supported:

    * ``thread-partition``: labels on the same thread are dependent; labels
      on different threads are independent unless their op pair appears in
      the conflict list.
    * ``explicit``: the independence relation is given directly as a set of
      unordered label pairs.

    Every label is dependent with itself in both modes.  Instances are
    immutable; derived structures (dependence adjacency, bit masks) are
    computed once and cached.
    """

    THREAD_PARTITION = "thread-partition"
    EXPLICIT = "explicit"

    def __init__(self, labels: Iterable[Label], mode: str,
                 conflicts: Iterable[tuple[str, str]] = (),
                 independent_pairs: Iterable[tuple[Label, Label]] = ()):
        self.labels: tuple[Label, ...] = tuple(dict.fromkeys(labels))
        self.mode = mode
        self._index = {lab: i for i, lab in enumerate(self.labels)}
        if mode == self.THREAD_PARTITION:
            self.conflicts = frozenset(_unordered(a, b) for a, b in conflicts)
            self.independent_pairs = None
        elif mode == self.EXPLICIT:
            pairs = set()
            for a, b in independent_pairs:
                if a == b:
                    raise ValueError(f"independence must be irreflexive: {a!r}")
                if a not in self._index or b not in self._index:
                    raise UnknownLabelError(f"independence pair uses unknown label: {a!r}, {b!r}")
                pairs.add(_unordered(a, b))
            self.conflicts = None
            self.independent_pairs = frozenset(pairs)
        else:
            raise ValueError(f"unknown alphabet mode: {mode!r}")
        self._dep_ids_cache: list[list[int]] | None = None
        self._dep_masks_cache: list[int] | None = None
        self._threads_cache: tuple[str, ...] | None = None

    # -- construction helpers -------------------------------------------------

    @classmethod
    def thread_partition(cls, labels: Iterable[Label] = (),
                         conflicts: Iterable[tuple[str, str]] = ()) -> "ConcurrentAlphabet":
        return cls(labels, cls.THREAD_PARTITION, conflicts=conflicts)

    @classmethod
    def explicit_independent(cls, labels: Iterable[Label],
                             pairs: Iterable[tuple[Label, Label]]) -> "ConcurrentAlphabet":
        return cls(labels, cls.EXPLICIT, independent_pairs=pairs)

    @classmethod
    def explicit_dependent(cls, labels: Iterable[Label],
                           pairs: Iterable[tuple[Label, Label]]) -> "ConcurrentAlphabet":
        """Build from the complement: the listed pairs (plus the diagonal) are
        dependent, everything else is independent."""
        labels = tuple(dict.fromkeys(labels))
        dep = {_unordered(a, b) for a, b in pairs}
        indep = [(a, b) for a, b in itertools.combinations(labels, 2)
                 if _unordered(a, b) not in dep]
        return cls(labels, cls.EXPLICIT, independent_pairs=indep)

    def with_labels(self, extra: Iterable[Label]) -> "ConcurrentAlphabet":
        """Return an alphabet extended with the given labels.

        Only thread-partition alphabets may auto-register new labels; an
        explicit relation says nothing about labels it has never seen.
        """
        extra = [lab for lab in extra if lab not in self._index]
        if not extra:
            return self
        if self.mode != self.THREAD_PARTITION:
            raise UnknownLabelError(f"labels not declared in explicit alphabet: {sorted(set(extra))}")
        return ConcurrentAlphabet(self.labels + tuple(extra), self.THREAD_PARTITION,
                                  conflicts=_pair_tuples(self.conflicts))

    # -- basic queries ---------------------------------------------------------

    def __contains__(self, label: Label) -> bool:
        return label in self._index

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label: Label) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownLabelError(f"label not in alphabet: {label!r}") from None

    def find(self, label: Label) -> int | None:
        """Index of the label, or None if it is not in the alphabet."""
        return self._index.get(label)

    def threads(self) -> tuple[str, ...]:
        """Distinct threads appearing in the label set, sorted."""
        if self._threads_cache is None:
            self._threads_cache = tuple(sorted({lab.thread for lab in self.labels}))
        return self._threads_cache

    def dependent(self, a: Label, b: Label) -> bool:
        """True iff (a, b) is NOT independent.  Always true for a == b."""
        ia, ib = self.index(a), self.index(b)
        return self.dependent_ids(ia, ib)

    def dependent_ids(self, ia: int, ib: int) -> bool:
        if ia == ib:
            return True
        a, b = self.labels[ia], self.labels[ib]
        if self.mode == self.THREAD_PARTITION:
            return a.thread == b.thread or _unordered(a.op, b.op) in self.conflicts
        return _unordered(a, b) not in self.independent_pairs

    # -- cached dependence adjacency --------------------------------------------

    def dependent_label_ids(self) -> list[list[int]]:
        """For each label index, the indices of all labels dependent with it."""
        if self._dep_ids_cache is None:
            n = len(self.labels)
            self._dep_ids_cache = [[j for j in range(n) if self.dependent_ids(i, j)]
                                   for i in range(n)]
        return self._dep_ids_cache

    def dependence_masks(self) -> list[int]:
        """Bitmask form of :meth:`dependent_label_ids` (bit j set iff dependent)."""
        if self._dep_masks_cache is None:
            masks = []
            for deps in self.dependent_label_ids():
                m = 0
                for j in deps:
                    m |= 1 << j
                masks.append(m)
            self._dep_masks_cache = masks
        return self._dep_masks_cache

    def same_thread_dependent(self) -> bool:
        """True iff every pair of labels on the same thread is dependent.

        Thread-partition alphabets satisfy this by construction; explicit
        ones may not.  The vector-clock machinery requires it.
        """
        if self.mode == self.THREAD_PARTITION:
            return True
        by_thread: dict[str, list[int]] = {}
        for i, lab in enumerate(self.labels):
            by_thread.setdefault(lab.thread, []).append(i)
        for ids in by_thread.values():
            for ia, ib in itertools.combinations(ids, 2):
                if not self.dependent_ids(ia, ib):
                    return False
        return True

    # -- structural identity -----------------------------------------------------

    def _key(self):
        rel = self.conflicts if self.mode == self.THREAD_PARTITION else self.independent_pairs
        return (self.mode, frozenset(self.labels), rel)

    def __eq__(self, other) -> bool:
        return isinstance(other, ConcurrentAlphabet) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        return f"ConcurrentAlphabet(mode={self.mode!r}, labels={len(self.labels)})"


def dependent(alphabet: ConcurrentAlphabet, a: Label, b: Label) -> bool:
    """Membership test in the dependence relation (complement of independence)."""
    return alphabet.dependent(a, b)


def width(alphabet: ConcurrentAlphabet) -> int:
    """Maximum clique size of the independence graph.

    This bounds the size of any antichain of the order induced on a trace.
    For a thread-partition alphabet with no conflicts it is simply the
    number of threads; otherwise an exact Bron-Kerbosch search is run
    (fine for alphabets up to a few dozen labels).
    """
    n = len(alphabet.labels)
    if n == 0:
        raise ValueError("width of an empty alphabet is undefined")
    if alphabet.mode == ConcurrentAlphabet.THREAD_PARTITION and not alphabet.conflicts:
        return len(alphabet.threads())
    # adjacency of the independence graph, as bitmasks
    full = (1 << n) - 1
    dep_masks = alphabet.dependence_masks()
    indep = [full & ~dep_masks[i] & ~(1 << i) for i in range(n)]

    best = 1

    def bron_kerbosch(size: int, p: int, x: int) -> None:
        nonlocal best
        if p == 0 and x == 0:
            best = max(best, size)
            return
        if size + p.bit_count() <= best:
            return
        # pivot = vertex of p|x with most neighbours in p
        pivot, pivot_deg = -1, -1
        px = p | x
        while px:
            v = (px & -px).bit_length() - 1
            px &= px - 1
            deg = (indep[v] & p).bit_count()
            if deg > pivot_deg:
                pivot, pivot_deg = v, deg
        cand = p & ~indep[pivot]
        while cand:
            v = (cand & -cand).bit_length() - 1
            cand &= cand - 1
            vb = 1 << v
            bron_kerbosch(size + 1, p & indep[v], x & indep[v])
            p &= ~vb
            x |= vb

    bron_kerbosch(0, full, 0)
    return best


class Trace:
    """An indexed event sequence over a fixed concurrent alphabet.

    Events are identified by position; internally only label indices are
    stored so that million-event traces stay cheap.
    """

    __slots__ = ("alphabet", "label_ids")

    def __init__(self, labels: Sequence[Label], alphabet: ConcurrentAlphabet):
        self.alphabet = alphabet
        self.label_ids: list[int] = [alphabet.index(lab) for lab in labels]

    @classmethod
    def from_label_ids(cls, ids: Sequence[int], alphabet: ConcurrentAlphabet) -> "Trace":
        t = cls.__new__(cls)
        t.alphabet = alphabet
        t.label_ids = list(ids)
        return t

    def __len__(self) -> int:
        return len(self.label_ids)

    def label(self, i: int) -> Label:
        return self.alphabet.labels[self.label_ids[i]]

    def event(self, i: int) -> Event:
        if not 0 <= i < len(self.label_ids):
            raise IndexError(f"event id out of range: {i}")
        return Event(i, self.label(i))

    def events(self) -> Iterator[Event]:
        labs = self.alphabet.labels
        for i, li in enumerate(self.label_ids):
            yield Event(i, labs[li])

    def labels(self) -> list[Label]:
        labs = self.alphabet.labels
        return [labs[li] for li in self.label_ids]

    def threads(self) -> tuple[str, ...]:
        return tuple(sorted({self.alphabet.labels[li].thread for li in self.label_ids}))

    def __eq__(self, other) -> bool:
        return (isinstance(other, Trace) and self.labels() == other.labels()
                and self.alphabet == other.alphabet)

    def __repr__(self) -> str:
        return f"Trace({len(self)} events, {len(self.alphabet)} labels)"


# ---------------------------------------------------------------------------
# Patterns
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Pattern:
    """A subsequence pattern.

    ``positions`` holds one nonempty label set per matched position; a set
    with several labels abbreviates the union of all per-position choices
    (see :func:`expand_pattern`).  Dimension 0 is allowed and denotes "any
    word", including the empty one.
    """

    positions: tuple[frozenset, ...]

    def __post_init__(self):
        for pos in self.positions:
            if not pos:
                raise ValueError("pattern positions must be nonempty label sets")

    @classmethod
    def of_labels(cls, labels: Iterable[Symbol]) -> "Pattern":
        return cls(tuple(frozenset((lab,)) for lab in labels))

    @property
    def dimension(self) -> int:
        return len(self.positions)

    def is_concrete(self) -> bool:
        return all(len(pos) == 1 for pos in self.positions)

    def label_sequence(self) -> tuple:
        """The label sequence of a concrete (single-label-position) pattern."""
        if not self.is_concrete():
            raise ValueError("pattern has multi-label positions; expand it first")
        return tuple(next(iter(pos)) for pos in self.positions)


@dataclass(frozen=True)
class EmptyLang:
    """The empty language: matches nothing."""


@dataclass(frozen=True)
class EpsilonLang:
    """The language containing exactly the empty word."""


Disjunct = EmptyLang | EpsilonLang | Pattern


@dataclass(frozen=True)
class GeneralizedPattern:
    """A finite union of patterns, the empty-word language, and the empty set."""

    disjuncts: tuple[Disjunct, ...]

    @classmethod
    def of(cls, *disjuncts: Disjunct) -> "GeneralizedPattern":
        return cls(tuple(disjuncts))

    @classmethod
    def empty(cls) -> "GeneralizedPattern":
        return cls(())


def expand_pattern(p: Pattern, cap: int = 1024) -> list[Pattern]:
    """Compile per-position label sets into concrete patterns.

    The result enumerates the cartesian product of per-position choices in
    lexicographic choice order (labels sorted within each position).
    Raises :class:`ExpansionCapError` if the product exceeds ``cap``.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    size = 1
    for pos in p.positions:
        size *= len(pos)
    if size > cap:
        raise ExpansionCapError(f"pattern expands to {size} concrete patterns (cap {cap})")
    choices = [sorted(pos) for pos in p.positions]
    return [Pattern.of_labels(combo) for combo in itertools.product(*choices)]


def _is_subsequence(u: Sequence, w: Sequence) -> bool:
    it = iter(w)
    return all(any(x == y for y in it) for x in u)


def shuffle_supersequences(u: Sequence[Symbol], v: Sequence[Symbol]) -> set[tuple]:
    """All minimal common supersequences of ``u`` and ``v``.

    Returns every word that contains both inputs as subsequences and has no
    strict subsequence doing the same.  Every common supersequence contains
    one of these as a subsequence, so they generate the intersection of two
    subsequence patterns.  Output length never exceeds ``|u| + |v|``.
    """
    u, v = tuple(u), tuple(v)
    merged: set[tuple] = set()

    stack = [(u, v, ())]
    while stack:
        ru, rv, acc = stack.pop()
        if not ru:
            merged.add(acc + rv)
            continue
        if not rv:
            merged.add(acc + ru)
            continue
        stack.append((ru[1:], rv, acc + ru[:1]))
        stack.append((ru, rv[1:], acc + rv[:1]))
        if ru[0] == rv[0]:
            stack.append((ru[1:], rv[1:], acc + ru[:1]))

    # keep only subsequence-minimal candidates; any common supersequence
    # contains a merge word, so filtering within the merge set is exact
    out = set()
    for w in merged:
        if not any(w2 != w and len(w2) <= len(w) and _is_subsequence(w2, w) for w2 in merged):
            out.add(w)
    return out


# -- generalized-pattern algebra ---------------------------------------------

def gp_union(g1: GeneralizedPattern, g2: GeneralizedPattern) -> GeneralizedPattern:
    return GeneralizedPattern(_dedup(g1.disjuncts + g2.disjuncts))


def gp_concat(g1: GeneralizedPattern, g2: GeneralizedPattern) -> GeneralizedPattern:
    """Pairwise concatenation; epsilon is the identity, the empty set annihilates."""
    out: list[Disjunct] = []
    for d1 in g1.disjuncts:
        for d2 in g2.disjuncts:
            if isinstance(d1, EmptyLang) or isinstance(d2, EmptyLang):
                continue
            if isinstance(d1, EpsilonLang):
                out.append(d2)
            elif isinstance(d2, EpsilonLang):
                out.append(d1)
            else:
                out.append(Pattern(d1.positions + d2.positions))
    return GeneralizedPattern(_dedup(tuple(out)))


def gp_intersect(g1: GeneralizedPattern, g2: GeneralizedPattern) -> GeneralizedPattern:
    """Pairwise intersection.

    Two concrete patterns intersect to the union of patterns over all
    minimal common supersequences of their label sequences.  Operands must
    have single-label positions (expand first).
    """
    out: list[Disjunct] = []
    for d1 in g1.disjuncts:
        for d2 in g2.disjuncts:
            if isinstance(d1, EmptyLang) or isinstance(d2, EmptyLang):
                continue
            if isinstance(d1, EpsilonLang) and isinstance(d2, EpsilonLang):
                out.append(EpsilonLang())
            elif isinstance(d1, EpsilonLang):
                if d2.dimension == 0:
                    out.append(EpsilonLang())
            elif isinstance(d2, EpsilonLang):
                if d1.dimension == 0:
                    out.append(EpsilonLang())
            else:
                words = shuffle_supersequences(d1.label_sequence(), d2.label_sequence())
                out.extend(Pattern.of_labels(w) for w in sorted(words))
    return GeneralizedPattern(_dedup(tuple(out)))


def gp_star(g: GeneralizedPattern) -> GeneralizedPattern:
    """Kleene star.  For this class, star(L) = L + {epsilon} (after dropping
    empty-set disjuncts); concatenations collapse back into single patterns
    because every pattern is closed under appending arbitrary suffixes."""
    kept = tuple(d for d in g.disjuncts if not isinstance(d, EmptyLang))
    return GeneralizedPattern(_dedup(kept + (EpsilonLang(),)))


def _dedup(disjuncts: tuple[Disjunct, ...]) -> tuple[Disjunct, ...]:
    return tuple(dict.fromkeys(disjuncts))


# ---------------------------------------------------------------------------
# NFAs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Transition:
    """One NFA transition.  ``guard`` is a single symbol, a frozenset of
    symbols (matches any of them), or None (matches every symbol)."""

    src: int
    guard: object
    dst: int

    def matches(self, symbol: Symbol) -> bool:
        g = self.guard
        if g is None:
            return True
        if isinstance(g, frozenset):
            return symbol in g
        return g == symbol


@dataclass(frozen=True)
class Nfa:
    """A nondeterministic finite automaton without epsilon transitions."""

    state_count: int
    initial: frozenset[int]
    accepting: frozenset[int]
    transitions: tuple[Transition, ...]

    def __post_init__(self):
        for s in itertools.chain(self.initial, self.accepting):
            if not 0 <= s < self.state_count:
                raise ValueError(f"state id out of range: {s}")
        for t in self.transitions:
            if not (0 <= t.src < self.state_count and 0 <= t.dst < self.state_count):
                raise ValueError(f"transition references state out of range: {t}")

    def step(self, states: frozenset[int], symbol: Symbol) -> frozenset[int]:
        return frozenset(t.dst for t in self.transitions
                         if t.src in states and t.matches(symbol))

    def accepts(self, word: Sequence[Symbol]) -> bool:
        states = self.initial
        for sym in word:
            if not states:
                return False
            states = self.step(states, sym)
        return bool(states & self.accepting)

    def is_suffix_closed(self) -> bool:
        """True iff every accepting state carries an any-symbol self-loop,
        i.e. acceptance survives appending arbitrary suffixes."""
        looped = {t.src for t in self.transitions
                  if t.guard is None and t.src == t.dst}
        return self.accepting <= looped


def pattern_to_nfa(p: Pattern) -> Nfa:
    """Compile a pattern into the obvious (d+1)-state NFA.

    State i means "the first i positions have been matched"; every state
    carries an any-symbol self-loop, so the automaton is suffix-closed.
    Multi-label positions become set guards.
    """
    d = p.dimension
    transitions = [Transition(i, None, i) for i in range(d + 1)]
    for i, pos in enumerate(p.positions):
        guard = next(iter(pos)) if len(pos) == 1 else frozenset(pos)
        transitions.append(Transition(i, guard, i + 1))
    return Nfa(d + 1, frozenset({0}), frozenset({d}), tuple(transitions))


def gp_to_nfa(g: GeneralizedPattern) -> Nfa:
    """Compile a generalized pattern into one NFA (disjoint union of parts)."""
    transitions: list[Transition] = []
    initial: set[int] = set()
    accepting: set[int] = set()
    count = 0
    for d in g.disjuncts:
        if isinstance(d, EmptyLang):
            continue
        if isinstance(d, EpsilonLang):
            initial.add(count)
            accepting.add(count)
            count += 1
            continue
        part = pattern_to_nfa(d)
        transitions.extend(Transition(t.src + count, t.guard, t.dst + count)
                           for t in part.transitions)
        initial.update(s + count for s in part.initial)
        accepting.update(s + count for s in part.accepting)
        count += part.state_count
    if count == 0:
        # empty language: one non-accepting sink
        return Nfa(1, frozenset({0}), frozenset(), ())
    return Nfa(count, frozenset(initial), frozenset(accepting), tuple(transitions))


# ---------------------------------------------------------------------------
# Membership
# ---------------------------------------------------------------------------

def pattern_matches(p: Pattern, word: Sequence[Symbol]) -> bool:
    """Subsequence test; greedy left-to-right matching is exact here."""
    i = 0
    n = len(word)
    for choices in p.positions:
        while i < n and word[i] not in choices:
            i += 1
        if i == n:
            return False
        i += 1
    return True


def word_membership(spec, word: Sequence[Symbol]) -> bool:
    """Does the word itself belong to the specification language?

    This is the plain (non-predictive) monitoring question.  ``spec`` may
    be a Pattern, a GeneralizedPattern, or an Nfa.
    """
    if isinstance(spec, Pattern):
        return pattern_matches(spec, word)
    if isinstance(spec, GeneralizedPattern):
        for d in spec.disjuncts:
            if isinstance(d, EmptyLang):
                continue
            if isinstance(d, EpsilonLang):
                if len(word) == 0:
                    return True
            elif pattern_matches(d, word):
                return True
        return False
    if isinstance(spec, Nfa):
        return spec.accepts(word)
    raise TypeError(f"unsupported specification type: {type(spec).__name__}")
