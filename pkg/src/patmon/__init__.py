"""Predictive monitoring of concurrent execution logs.

Given a logged execution, an independence relation over its event labels,
and an order pattern, decide whether some reordering of the log that only
ever commutes adjacent independent events matches the pattern.  The
streaming monitor answers in one pass and constant space; an exact
ideal-enumeration engine covers arbitrary NFA languages; a brute-force
oracle cross-validates both on small instances.
"""

from .core import (ConcurrentAlphabet, EmptyLang, EpsilonLang, Event,
                   ExpansionCapError, GeneralizedPattern, Label, Nfa, Pattern,
                   Trace, Transition, UnknownLabelError, dependent,
                   expand_pattern, gp_concat, gp_intersect, gp_star, gp_to_nfa,
                   gp_union, pattern_matches, pattern_to_nfa,
                   shuffle_supersequences, width, word_membership)
from .order import (ClockStream, VectorClock, after_set_labels, after_set_new,
                    after_set_step, afterset_causality, ancestor_masks,
                    happens_before, immediate_predecessors, vc_leq, vc_stream)
from .monitor import (MATCH, NO_MATCH, AfterSetMonitor, CandidateTuple,
                      MatchReport, VectorClockMonitor, Witness,
                      check_admissible, run_monitor,
                      sort_to_target, stream_step, target_subsequence, vc_monitor_step,
                      tuple_join, tuple_leq, witness_reordering)
from .baseline import (IdealBudgetError, ideal_count, iter_ideal_keys,
                       minimal_extensions, run_baseline)
from .oracle import (TruncatedEnumerationError, all_linearizations,
                     ov_bruteforce, predictive_membership_bruteforce)
from .gen import (OvInstance, PatternSample, gen_ov, gen_random_trace,
                  race_nfa, sample_pattern)

__all__ = [name for name in dir() if not name.startswith("_")]
