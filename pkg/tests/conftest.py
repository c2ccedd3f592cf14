"""Shared fixtures and brute-force helpers for the test suite."""

import itertools

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from patmon import ConcurrentAlphabet, Label, Pattern, Trace
from patmon.order import ancestor_masks

settings.register_profile("suite", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("suite")


def mk_alphabet(labels, conflicts=()):
    return ConcurrentAlphabet.thread_partition([Label(*l) for l in labels], conflicts)


def mk_trace(pairs, conflicts=(), extra_labels=()):
    """Trace from (thread, op) pairs over a thread-partition alphabet."""
    labels = [Label(*p) for p in pairs]
    alphabet = ConcurrentAlphabet.thread_partition(
        labels + [Label(*l) for l in extra_labels], conflicts)
    return Trace(labels, alphabet)


@pytest.fixture
def tr1():
    """Write-conflict chain: all three events totally ordered."""
    return mk_trace([("t1", "w(x)"), ("t2", "w(x)"), ("t2", "w(y)")],
                    conflicts=[("w(x)", "w(x)")])


@pytest.fixture
def tr2():
    """One independent pair."""
    return mk_trace([("t1", "a"), ("t2", "b")])


@pytest.fixture
def tr3():
    """Two events on one thread: program order."""
    return mk_trace([("t1", "a"), ("t1", "b")])


SAFE_EVENTS = [
    ("main", "fork(t1)"), ("main", "fork(t2)"),
    ("t1", "reset_Call"), ("t1", "clear_Call(inputs)"), ("t1", "write(inputs)"),
    ("t1", "clear_Return"), ("t1", "set(count)"), ("t1", "reset_Return"),
    ("t2", "play_Call"), ("t2", "add_Call(inputs)"), ("t2", "write(inputs)"),
    ("t2", "add_Return"), ("t2", "set(count)"), ("t2", "play_Return"),
]

FAIL_PATTERN_LABELS = [
    Label("t2", "add_Call(inputs)"), Label("t1", "clear_Call(inputs)"),
    Label("t1", "set(count)"), Label("t2", "set(count)"),
]


@pytest.fixture
def safe_trace():
    """14-event log of two methods that should have run atomically; the
    inconsistent interleaving is reachable only by reordering."""
    return mk_trace(SAFE_EVENTS, conflicts=[("write(inputs)", "write(inputs)")])


@pytest.fixture
def fail_pattern():
    return Pattern.of_labels(FAIL_PATTERN_LABELS)


# ---------------------------------------------------------------------------
# Brute-force reference machinery
# ---------------------------------------------------------------------------

def hb_matrix(trace):
    """hb[e] = bitmask of events at-or-after e in the induced order...
    actually: returns anc masks, where (anc[f] >> e) & 1 iff e <= f."""
    return ancestor_masks(trace)


def hb(anc, e, f):
    """e at-or-before f, from precomputed ancestor masks."""
    return bool((anc[f] >> e) & 1)


def admissible_by_acyclicity(trace, ids, ranks):
    """Independent admissibility oracle: add the target chain edges to the
    order graph and test acyclicity via the comparability matrix.

    ``ranks[i]`` is slot i's position in the target arrangement.  With the
    order graph already transitively closed, a cycle exists iff some
    flipped pair is ordered.
    """
    anc = ancestor_masks(trace)
    for i, e in enumerate(ids):
        for j, f in enumerate(ids):
            if e < f and ranks[j] < ranks[i] and hb(anc, e, f):
                return False
    return True


def all_downsets(trace):
    """Every downward-closed event set, by subset enumeration (small traces)."""
    n = len(trace)
    anc = ancestor_masks(trace)
    out = []
    for bits in range(1 << n):
        ok = True
        for f in range(n):
            if (bits >> f) & 1 and (anc[f] & ~bits & ((1 << n) - 1)):
                ok = False
                break
        if ok:
            out.append(bits)
    return out


def count_topological_orders(trace):
    """Independent DP over subsets: number of linearizations."""
    n = len(trace)
    anc = ancestor_masks(trace)
    counts = [0] * (1 << n)
    counts[0] = 1
    for bits in range(1, 1 << n):
        total = 0
        for f in range(n):
            if not (bits >> f) & 1:
                continue
            rest = bits & ~(1 << f)
            # f may come last iff nothing else in bits sits at-or-after it
            if any((anc[g] >> f) & 1 for g in range(n) if (rest >> g) & 1):
                continue
            total += counts[rest]
        counts[bits] = total
    return counts[-1]


def exhaustive_traces(alphabet, max_len):
    """All traces up to the given length over the alphabet's labels."""
    labels = alphabet.labels
    for length in range(max_len + 1):
        for combo in itertools.product(range(len(labels)), repeat=length):
            yield Trace.from_label_ids(list(combo), alphabet)
