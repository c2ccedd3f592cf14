"""Alphabets, patterns, the pattern algebra, and NFAs."""

import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from patmon import (ConcurrentAlphabet, EmptyLang, EpsilonLang, ExpansionCapError,
                    GeneralizedPattern, Label, Pattern, UnknownLabelError,
                    expand_pattern, gp_concat, gp_intersect, gp_star, gp_union,
                    pattern_to_nfa, shuffle_supersequences, width, word_membership)
from patmon.core import dependent, gp_to_nfa

from conftest import mk_alphabet


class TestDependence:
    def test_write_conflict_across_threads(self):
        al = mk_alphabet([("t1", "w(x)"), ("t2", "w(x)")], [("w(x)", "w(x)")])
        assert dependent(al, Label("t1", "w(x)"), Label("t2", "w(x)"))

    def test_diagonal_always_dependent(self):
        al = mk_alphabet([("t1", "x")])
        assert dependent(al, Label("t1", "x"), Label("t1", "x"))

    def test_cross_thread_no_conflict_independent(self):
        al = mk_alphabet([("t1", "w(x)"), ("t2", "w(y)")])
        assert not dependent(al, Label("t1", "w(x)"), Label("t2", "w(y)"))

    def test_unknown_label_rejected(self):
        al = mk_alphabet([("t1", "a")])
        with pytest.raises(UnknownLabelError):
            dependent(al, Label("t1", "a"), Label("t9", "zz"))

    def test_explicit_mode_symmetric(self):
        a, b = Label("t1", "x"), Label("t2", "y")
        al = ConcurrentAlphabet.explicit_independent([a, b], [(a, b)])
        assert not al.dependent(a, b)
        assert not al.dependent(b, a)
        assert al.dependent(a, a)

    def test_explicit_reflexive_pair_rejected(self):
        a = Label("t1", "x")
        with pytest.raises(ValueError):
            ConcurrentAlphabet.explicit_independent([a], [(a, a)])

    def test_explicit_dependent_complement(self):
        a, b, c = Label("t1", "x"), Label("t2", "y"), Label("t3", "z")
        al = ConcurrentAlphabet.explicit_dependent([a, b, c], [(a, b)])
        assert al.dependent(a, b)
        assert not al.dependent(a, c)
        assert not al.dependent(b, c)


class TestWidth:
    def test_partition_shortcut(self):
        labels = [(f"p{i}", f"a{j}") for i in range(1, 4) for j in range(1, 4)] \
            + [(f"p{i}", "#") for i in range(1, 4)]
        assert width(mk_alphabet(labels)) == 3

    def test_no_independence_gives_one(self):
        a, b = Label("t1", "x"), Label("t1", "y")
        al = ConcurrentAlphabet.explicit_independent([a, b], [])
        assert width(al) == 1

    def test_conflicts_shrink_cliques(self):
        al = mk_alphabet([("t1", "w(x)"), ("t2", "w(x)"), ("t2", "w(y)")],
                         [("w(x)", "w(x)")])
        assert width(al) == 2

    def test_empty_alphabet_rejected(self):
        with pytest.raises(ValueError):
            width(mk_alphabet([]))

    def test_bron_kerbosch_matches_bruteforce(self):
        # mixed conflicts, exhaustive clique check
        labels = [(f"t{i}", f"o{j}") for i in range(3) for j in range(2)]
        al = mk_alphabet(labels, [("o0", "o0"), ("o0", "o1")])
        labs = al.labels
        best = 1
        for r in range(1, len(labs) + 1):
            for combo in itertools.combinations(range(len(labs)), r):
                if all(not al.dependent_ids(i, j)
                       for i, j in itertools.combinations(combo, 2)):
                    best = max(best, r)
        assert width(al) == best

    def test_invariant_under_relabeling(self):
        al = mk_alphabet([("t1", "a"), ("t2", "a"), ("t2", "b"), ("t3", "b")],
                         [("a", "b")])
        renamed = mk_alphabet([("u9", "z1"), ("u7", "z1"), ("u7", "z2"), ("u5", "z2")],
                              [("z1", "z2")])
        assert width(al) == width(renamed)


class TestExpandPattern:
    A, B, C = Label("t", "a"), Label("t", "b"), Label("t", "c")

    def test_singletons_pass_through(self):
        p = Pattern.of_labels([self.A, self.B])
        assert expand_pattern(p) == [p]

    def test_product_enumeration_order(self):
        p = Pattern((frozenset({self.A, self.B}), frozenset({self.C})))
        assert expand_pattern(p) == [Pattern.of_labels([self.A, self.C]),
                                     Pattern.of_labels([self.B, self.C])]

    def test_cap_enforced(self):
        pos = frozenset({self.A, self.B})
        p = Pattern((pos, pos, pos))
        with pytest.raises(ExpansionCapError):
            expand_pattern(p, cap=4)
        assert len(expand_pattern(p, cap=8)) == 8

    def test_empty_position_rejected(self):
        with pytest.raises(ValueError):
            Pattern((frozenset(),))


class TestShuffleSupersequences:
    def test_two_distinct_letters(self):
        assert shuffle_supersequences("a", "b") == {("a", "b"), ("b", "a")}

    def test_identical_words(self):
        assert shuffle_supersequences("ab", "ab") == {("a", "b")}

    def test_crossing_pair(self):
        got = {"".join(w) for w in shuffle_supersequences("ab", "ba")}
        assert got == {"aba", "bab"}

    def test_empty_left_identity(self):
        assert shuffle_supersequences("", "ab") == {("a", "b")}

    @given(st.text(alphabet="ab", max_size=3), st.text(alphabet="ab", max_size=3))
    def test_outputs_minimal_and_contain_inputs(self, u, v):
        def subseq(x, w):
            it = iter(w)
            return all(c in it for c in x)

        out = shuffle_supersequences(u, v)
        assert out
        for w in out:
            assert len(w) <= len(u) + len(v)
            assert subseq(u, w) and subseq(v, w)
        for w1, w2 in itertools.permutations(out, 2):
            assert not (w1 != w2 and subseq(w1, w2))

    @given(st.text(alphabet="abc", max_size=3), st.text(alphabet="abc", max_size=3))
    def test_generates_the_intersection(self, u, v):
        # w contains u and v iff w contains some minimal supersequence
        out = shuffle_supersequences(u, v)

        def subseq(x, w):
            it = iter(w)
            return all(c in it for c in x)

        for n in range(0, 5):
            for w in itertools.product("abc", repeat=n):
                direct = subseq(u, w) and subseq(v, w)
                via = any(subseq(m, w) for m in out)
                assert direct == via


def _labels(word):
    return [Label("t", c) for c in word]


def _pat(word):
    return Pattern.of_labels(_labels(word))


def _gp(*words):
    return GeneralizedPattern.of(*(_pat(w) for w in words))


ALL_WORDS_2 = [tuple(w) for n in range(5) for w in itertools.product("ab", repeat=n)]


class TestGpAlgebra:
    def test_star_adds_epsilon(self):
        g = gp_star(_gp("a"))
        assert EpsilonLang() in g.disjuncts
        assert _pat("a") in g.disjuncts

    def test_concat_annihilator(self):
        g = gp_concat(GeneralizedPattern.of(EmptyLang()), _gp("a"))
        assert g.disjuncts == ()

    def test_concat_epsilon_identity(self):
        g = gp_concat(GeneralizedPattern.of(EpsilonLang()), _gp("ab"))
        assert g.disjuncts == (_pat("ab"),)

    def test_intersect_two_letters(self):
        g = gp_intersect(_gp("a"), _gp("b"))
        assert set(g.disjuncts) == {_pat("ab"), _pat("ba")}

    @pytest.mark.parametrize("w1", ["", "a", "ab", "ba"])
    @pytest.mark.parametrize("w2", ["", "b", "aa", "ab"])
    def test_ops_match_boolean_composition(self, w1, w2):
        g1, g2 = _gp(w1), _gp(w2)
        for word in ALL_WORDS_2:
            w = _labels("".join(word))
            m1, m2 = word_membership(g1, w), word_membership(g2, w)
            assert word_membership(gp_union(g1, g2), w) == (m1 or m2)
            assert word_membership(gp_intersect(g1, g2), w) == (m1 and m2)
            concat = word_membership(gp_concat(g1, g2), w)
            split = any(word_membership(g1, w[:i]) and word_membership(g2, w[i:])
                        for i in range(len(w) + 1))
            assert concat == split
            assert word_membership(gp_star(g1), w) == (m1 or len(w) == 0)

    def test_intersect_with_epsilon(self):
        eps = GeneralizedPattern.of(EpsilonLang())
        assert gp_intersect(eps, _gp("a")).disjuncts == ()
        sigma_star = GeneralizedPattern.of(Pattern(()))
        assert gp_intersect(eps, sigma_star).disjuncts == (EpsilonLang(),)


class TestMembership:
    def test_order_violated(self):
        assert not word_membership(_pat("ab"), _labels("ba"))

    def test_subsequence_present(self):
        assert word_membership(_pat("ab"), _labels("cacb"))

    def test_dimension_zero_matches_everything(self):
        assert word_membership(Pattern(()), [])
        assert word_membership(Pattern(()), _labels("xyz"))

    def test_epsilon_and_empty(self):
        g = GeneralizedPattern.of(EpsilonLang())
        assert word_membership(g, [])
        assert not word_membership(g, _labels("a"))
        assert not word_membership(GeneralizedPattern.empty(), [])

    def test_multi_label_positions_greedy(self):
        a, b, c = Label("t", "a"), Label("t", "b"), Label("t", "c")
        p = Pattern((frozenset({a, b}), frozenset({c})))
        assert word_membership(p, [b, c])
        assert word_membership(p, [a, c])
        assert not word_membership(p, [c, c])

    @given(st.lists(st.sampled_from("abc"), max_size=6),
           st.lists(st.sampled_from("abc"), min_size=1, max_size=3))
    def test_expanded_matches_iff_subsequence(self, word, patword):
        w = _labels("".join(word))
        for q in expand_pattern(_pat("".join(patword))):
            seq = q.label_sequence()
            it = iter(w)
            direct = all(lab in it for lab in seq)
            assert word_membership(q, w) == direct

    def test_membership_exhaustive_small_words(self):
        patterns = ["a", "b", "ab", "ba", "aba", "abc"]
        for patword in patterns:
            p = _pat(patword)
            seq = p.label_sequence()
            for n in range(7):
                for word in itertools.product("abc", repeat=n):
                    w = _labels("".join(word))
                    it = iter(w)
                    direct = all(lab in it for lab in seq)
                    assert word_membership(p, w) == direct


class TestNfa:
    def test_single_label_pattern_nfa(self):
        nfa = pattern_to_nfa(_pat("a"))
        assert nfa.state_count == 2
        assert nfa.accepts(_labels("xa"))
        assert not nfa.accepts(_labels("xx"))

    def test_dimension_zero_nfa(self):
        nfa = pattern_to_nfa(Pattern(()))
        assert nfa.state_count == 1
        assert nfa.accepts([])
        assert nfa.accepts(_labels("zz"))

    def test_order_sensitive(self):
        nfa = pattern_to_nfa(_pat("ab"))
        assert not nfa.accepts(_labels("ba"))
        assert nfa.accepts(_labels("xayb"))

    def test_suffix_closed(self):
        assert pattern_to_nfa(_pat("ab")).is_suffix_closed()

    @given(st.lists(st.sampled_from("abc"), max_size=6),
           st.lists(st.sampled_from("abc"), min_size=1, max_size=3))
    def test_nfa_agrees_with_membership(self, word, patword):
        p = _pat("".join(patword))
        w = _labels("".join(word))
        assert pattern_to_nfa(p).accepts(w) == word_membership(p, w)

    def test_nfa_agrees_exhaustively_on_small_words(self):
        for patword in ["a", "ab", "aba", "abc"]:
            p = _pat(patword)
            nfa = pattern_to_nfa(p)
            for n in range(7):
                for word in itertools.product("abc", repeat=n):
                    w = _labels("".join(word))
                    assert nfa.accepts(w) == word_membership(p, w)

    def test_gp_to_nfa_union(self):
        g = GeneralizedPattern.of(_pat("ab"), EpsilonLang())
        nfa = gp_to_nfa(g)
        assert nfa.accepts([])
        assert nfa.accepts(_labels("acb"))
        assert not nfa.accepts(_labels("b"))
        # the epsilon branch breaks suffix closure
        assert not nfa.is_suffix_closed()

    def test_state_range_validated(self):
        from patmon import Nfa, Transition
        with pytest.raises(ValueError):
            Nfa(2, frozenset({0}), frozenset({1}),
                (Transition(0, None, 5),))
