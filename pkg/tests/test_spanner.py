"""Marked words, marker sets, tuples, automata, regex compiler."""

from __future__ import annotations

import itertools
import random

import pytest

from slpspan import (
    MarkedWord,
    MarkerSet,
    SpanTuple,
    SpannerAutomaton,
    accepts,
    close_marker,
    compile_spanner_regex,
    determinize,
    eliminate_epsilon,
    format_automaton,
    format_tuple,
    insert_markers,
    join,
    make_non_tail_spanning,
    marker_set_to_tuple,
    markers_of,
    open_marker,
    parse_automaton,
    parse_tuple,
    shift_right,
    tuple_to_marker_set,
    validate_subword_marked,
    word_of,
)
from slpspan.spanner import (
    EPSILON,
    MarkerSetError,
    RegexError,
    SpannerError,
    canonical_label,
)

from conftest import (
    marker_set_from,
    random_document,
    random_marker_set,
    random_spanner_pattern,
)

# the running example: {open(x)} a b {open(y),open(z),close(x)} b c {close(z)} a b {close(y)} a c
EXAMPLE_MARKERS = marker_set_from(
    [
        ("open", "x", 1),
        ("close", "x", 3),
        ("open", "y", 3),
        ("close", "y", 7),
        ("open", "z", 3),
        ("close", "z", 5),
    ]
)
EXAMPLE_WORD = MarkedWord("abbcabac", EXAMPLE_MARKERS)


class TestMarkedWords:
    def test_word_of_example(self):
        assert word_of(EXAMPLE_WORD) == "abbcabac"

    def test_word_of_unmarked(self):
        assert word_of(MarkedWord("abc")) == "abc"

    def test_markers_of_example(self):
        assert markers_of(EXAMPLE_WORD) == EXAMPLE_MARKERS

    def test_markers_of_unmarked(self):
        assert markers_of(MarkedWord("abc")) == MarkerSet()

    def test_insert_markers_reproduces_example(self):
        assert insert_markers("abbcabac", EXAMPLE_MARKERS) == EXAMPLE_WORD

    def test_insert_markers_second_example(self):
        markers = marker_set_from(
            [("open", "y", 2), ("open", "z", 4), ("open", "x", 4), ("close", "z", 6)]
        )
        w = insert_markers("ababcc", markers)
        assert w.label_at(2) == canonical_label([open_marker("y")])
        assert w.label_at(4) == canonical_label([open_marker("x"), open_marker("z")])
        assert w.label_at(6) == canonical_label([close_marker("z")])
        assert list(w.symbols())[0] == "a"

    def test_insert_nothing(self):
        assert insert_markers("abc", MarkerSet()) == MarkedWord("abc")

    def test_roundtrip_laws(self):
        rng = random.Random(3)
        for _ in range(300):
            doc = random_document(rng, "abc", 20)
            markers = random_marker_set(rng, ("x", "y", "z"), len(doc))
            w = insert_markers(doc, markers)
            assert word_of(w) == doc
            assert markers_of(w) == markers

    def test_document_length(self):
        assert len(EXAMPLE_WORD) == 8

    def test_non_tail_detection(self):
        tail = marker_set_from([("open", "x", 3), ("close", "x", 4)])
        assert not insert_markers("abc", tail).is_non_tail_spanning()
        assert insert_markers("abcd", tail).is_non_tail_spanning()


class TestShiftAndJoin:
    def test_shift_example(self):
        markers = marker_set_from([("close", "x", 2), ("close", "y", 4)])
        shifted = shift_right(markers, 6)
        assert shifted == marker_set_from([("close", "x", 8), ("close", "y", 10)])

    def test_shift_zero_is_identity(self):
        assert shift_right(EXAMPLE_MARKERS, 0) == EXAMPLE_MARKERS

    def test_shift_additivity(self):
        rng = random.Random(5)
        for _ in range(100):
            markers = random_marker_set(rng, ("x", "y"), 10)
            a, b = rng.randint(0, 9), rng.randint(0, 9)
            assert shift_right(shift_right(markers, a), b) == shift_right(markers, a + b)

    def test_join_paper_example(self):
        first = marker_set_from(
            [("open", "y", 2), ("open", "z", 4), ("open", "x", 4), ("close", "z", 6)]
        )
        second = marker_set_from([("close", "x", 2), ("close", "y", 4)])
        combined = join(first, second, 6)
        assert combined == marker_set_from(
            [
                ("open", "y", 2),
                ("open", "z", 4),
                ("open", "x", 4),
                ("close", "z", 6),
                ("close", "x", 8),
                ("close", "y", 10),
            ]
        )

    def test_join_empty(self):
        assert join(EXAMPLE_MARKERS, MarkerSet(), 9) == EXAMPLE_MARKERS

    def test_join_split_violation(self):
        with pytest.raises(MarkerSetError, match="beyond split"):
            join(EXAMPLE_MARKERS, MarkerSet(), 3)

    def test_join_duplicate_marker(self):
        left = marker_set_from([("open", "x", 1)])
        right = marker_set_from([("open", "x", 1)])
        with pytest.raises(MarkerSetError, match="duplicated"):
            join(left, right, 2)

    def test_join_then_split_recovers_operands(self):
        rng = random.Random(9)
        for _ in range(200):
            split = rng.randint(1, 8)
            left = random_marker_set(rng, ("x",), split - 1) if split > 1 else MarkerSet()
            right = random_marker_set(rng, ("y", "z"), 6)
            combined = join(left, right, split)
            back_left = MarkerSet((m, p) for m, p in combined if p <= split)
            back_right = MarkerSet((m, p - split) for m, p in combined if p > split)
            assert back_left == left
            # right-side entries at relative position 0 cannot occur:
            # all its positions are >= 1, so the shift keeps them past the split
            assert back_right == right


class TestTupleConversions:
    def test_example_tuple_to_markers(self):
        t = SpanTuple({"x": (1, 3), "y": (3, 7), "z": (3, 5)})
        assert tuple_to_marker_set(t) == EXAMPLE_MARKERS

    def test_markers_to_tuple(self):
        t = marker_set_to_tuple(EXAMPLE_MARKERS, 8)
        assert t.get("x") == (1, 3)
        assert t.get("y") == (3, 7)
        assert t.get("z") == (3, 5)

    def test_empty_roundtrip(self):
        assert tuple_to_marker_set(SpanTuple({})) == MarkerSet()
        assert marker_set_to_tuple(MarkerSet(), 5) == SpanTuple({})

    def test_random_roundtrip(self):
        rng = random.Random(21)
        for _ in range(300):
            markers = random_marker_set(rng, ("x", "y", "z"), 12)
            t = marker_set_to_tuple(markers, 12)
            assert tuple_to_marker_set(t) == markers

    def test_incomplete_rejected(self):
        with pytest.raises(MarkerSetError, match="unpaired"):
            marker_set_to_tuple(marker_set_from([("open", "x", 1)]), 4)

    def test_ill_ordered_rejected(self):
        bad = marker_set_from([("open", "x", 4), ("close", "x", 2)])
        with pytest.raises(MarkerSetError, match="closes before"):
            marker_set_to_tuple(bad, 4)

    def test_position_bound_rejected(self):
        bad = marker_set_from([("open", "x", 1), ("close", "x", 9)])
        with pytest.raises(MarkerSetError, match="exceeds"):
            marker_set_to_tuple(bad, 4)

    def test_tuple_text_roundtrip(self):
        t = parse_tuple("x=[1,3> y=_ z=[3,5>")
        assert t.get("x") == (1, 3)
        assert t.get("y") is None
        assert format_tuple(t, ["x", "y", "z"]) == "x=[1,3> y=_ z=[3,5>"


class TestValidation:
    def test_example_is_valid(self):
        assert validate_subword_marked(EXAMPLE_WORD).ok

    def test_order_violation(self):
        w = insert_markers("abcd", marker_set_from([("close", "x", 2), ("open", "x", 4)]))
        report = validate_subword_marked(w)
        assert not report.ok
        assert report.violations[0][0] == "order"

    def test_disjointness_violation(self):
        w = insert_markers(
            "abcd", marker_set_from([("open", "x", 1), ("open", "x", 3), ("close", "x", 4)])
        )
        report = validate_subword_marked(w)
        assert any(code == "disjointness" for code, _ in report.violations)

    def test_pairing_violation(self):
        w = insert_markers("ab", marker_set_from([("open", "x", 1)]))
        report = validate_subword_marked(w)
        assert any(code == "pairing" for code, _ in report.violations)

    def test_tail_check(self):
        w = insert_markers("ab", marker_set_from([("open", "x", 1), ("close", "x", 3)]))
        assert validate_subword_marked(w).ok
        report = validate_subword_marked(w, require_non_tail_spanning=True)
        assert any(code == "tail" for code, _ in report.violations)


AUTOMATON_TEXT = """
states 3
start 1
accept 3
alphabet a b
vars x
trans 1 a 1
trans 1 {open(x)} 2
trans 2 b 3
trans 3 eps 1
trans 2 {close(x)} 3
"""


class TestAutomatonFormat:
    def test_parse_basics(self):
        m = parse_automaton(AUTOMATON_TEXT)
        assert m.state_count == 3
        assert m.accepting == frozenset({3})
        assert m.size == 5
        assert not m.deterministic

    def test_print_parse_identity(self):
        m = parse_automaton(AUTOMATON_TEXT)
        again = parse_automaton(format_automaton(m))
        assert again.arcs == m.arcs
        assert again.accepting == m.accepting
        assert again.alphabet == m.alphabet

    def test_unknown_variable(self):
        bad = AUTOMATON_TEXT.replace("{open(x)}", "{open(q)}")
        with pytest.raises(SpannerError, match="unknown variable"):
            parse_automaton(bad)

    def test_state_out_of_range(self):
        bad = AUTOMATON_TEXT + "trans 1 a 9\n"
        with pytest.raises(SpannerError, match="out of range"):
            parse_automaton(bad)

    def test_start_must_be_one(self):
        bad = AUTOMATON_TEXT.replace("start 1", "start 2")
        with pytest.raises(SpannerError, match="start state"):
            parse_automaton(bad)

    def test_unknown_terminal(self):
        bad = AUTOMATON_TEXT + "trans 1 z 2\n"
        with pytest.raises(SpannerError, match="not in the alphabet"):
            parse_automaton(bad)


class TestAccepts:
    def test_intro_accepts_marked_word(self, intro_spanner):
        m = make_non_tail_spanning(intro_spanner, "#")
        markers = marker_set_from(
            [("open", "x", 1), ("close", "x", 2), ("open", "y", 3), ("close", "y", 4)]
        )
        assert accepts(m, insert_markers("abcca#", markers))

    def test_intro_rejects_unmarked(self, intro_spanner):
        m = make_non_tail_spanning(intro_spanner, "#")
        assert not accepts(m, MarkedWord("abcca#"))

    def test_against_naive_path_search(self):
        rng = random.Random(33)
        for _ in range(60):
            m = _random_plain_nfa(rng, "ab", 5)
            for _ in range(20):
                doc = random_document(rng, "ab", 6)
                assert accepts(m, MarkedWord(doc)) == _naive_accept(m, doc)


class TestNonTailTransform:
    def test_acceptance_transfer(self, six_state_dfa):
        rng = random.Random(41)
        m2 = make_non_tail_spanning(six_state_dfa, "#")
        for _ in range(200):
            doc = random_document(rng, "abc", 8)
            markers = random_marker_set(rng, ("x", "y"), len(doc))
            plain = insert_markers(doc, markers)
            marked = insert_markers(doc + "#", markers)
            assert accepts(six_state_dfa, plain) == accepts(m2, marked)

    def test_no_tail_spanning_word_accepted(self, six_state_dfa):
        m2 = make_non_tail_spanning(six_state_dfa, "#")
        tail = marker_set_from([("open", "x", 1), ("close", "x", 4)])
        w = insert_markers("abc", tail)
        assert accepts(six_state_dfa, w)  # tail-spanning in the original
        assert not accepts(m2, w)  # but M' insists on the sentinel last

    def test_sentinel_collision(self, six_state_dfa):
        with pytest.raises(SpannerError, match="collides"):
            make_non_tail_spanning(six_state_dfa, "a")

    def test_determinism_preserved(self, six_state_dfa):
        assert make_non_tail_spanning(six_state_dfa, "#").deterministic


class TestRegexCompiler:
    def test_single_variable(self):
        m = compile_spanner_regex("x{ a }x", "a", ["x"])
        markers = marker_set_from([("open", "x", 1), ("close", "x", 2)])
        assert accepts(m, insert_markers("a", markers))
        assert not accepts(m, MarkedWord("a"))

    def test_adjacent_markers_saturated(self):
        m = compile_spanner_regex("x{ }x a", "a", ["x"])
        both = canonical_label([open_marker("x"), close_marker("x")])
        assert any(label == both for _, label, _ in m.arcs)
        markers = marker_set_from([("open", "x", 1), ("close", "x", 1)])
        assert accepts(m, insert_markers("a", markers))

    def test_saturation_across_variables(self):
        m = compile_spanner_regex("x{ a }x y{ b }y", "ab", ["x", "y"])
        markers = marker_set_from(
            [("open", "x", 1), ("close", "x", 2), ("open", "y", 2), ("close", "y", 3)]
        )
        assert accepts(m, insert_markers("ab", markers))

    def test_variable_reuse_rejected(self):
        with pytest.raises(RegexError, match="twice"):
            compile_spanner_regex("x{ a }x x{ b }x", "ab", ["x"])

    def test_variable_under_star_rejected(self):
        with pytest.raises(RegexError, match="repeat"):
            compile_spanner_regex("(x{ a }x)*", "a", ["x"])

    def test_variable_reuse_across_branches_allowed(self):
        m = compile_spanner_regex("(x{ a }x|x{ b }x)", "ab", ["x"])
        markers = marker_set_from([("open", "x", 1), ("close", "x", 2)])
        assert accepts(m, insert_markers("b", markers))

    def test_unbalanced_brackets(self):
        with pytest.raises(RegexError):
            compile_spanner_regex("x{ a", "a", ["x"])
        with pytest.raises(RegexError):
            compile_spanner_regex("x{ a }y", "a", ["x", "y"])

    def test_empty_pattern_rejected(self):
        with pytest.raises(RegexError, match="empty"):
            compile_spanner_regex("", "a", [])

    def test_undeclared_terminal(self):
        with pytest.raises(RegexError, match="alphabet"):
            compile_spanner_regex("d", "abc", [])

    def test_plain_regex_operators(self):
        m = compile_spanner_regex("(a|b)+ c?", "abc", [])
        assert accepts(m, MarkedWord("abab"))
        assert accepts(m, MarkedWord("abc"))
        assert not accepts(m, MarkedWord("c"))
        assert not accepts(m, MarkedWord("abcc"))


class TestDeterminize:
    def test_already_deterministic(self, six_state_dfa):
        assert determinize(six_state_dfa) is six_state_dfa

    def test_equivalence_on_all_short_marked_words(self):
        rng = random.Random(55)
        for trial in range(25):
            pattern = random_spanner_pattern(rng, "ab", ("x",))
            nfa = compile_spanner_regex(pattern, "ab", ["x"])
            dfa = determinize(nfa)
            assert dfa.deterministic
            for doc_len in range(0, 4):
                for chars in itertools.product("ab", repeat=doc_len):
                    doc = "".join(chars)
                    for markers in _all_marker_sets(("x",), doc_len):
                        w = insert_markers(doc, markers)
                        assert accepts(nfa, w) == accepts(dfa, w), (pattern, repr(w))

    def test_epsilon_elimination_equivalence(self):
        rng = random.Random(57)
        for _ in range(40):
            m = _random_plain_nfa(rng, "ab", 5)
            m2 = eliminate_epsilon(m)
            assert not m2.has_epsilon
            for _ in range(30):
                doc = random_document(rng, "ab", 6)
                assert accepts(m, MarkedWord(doc)) == accepts(m2, MarkedWord(doc))

    def test_cap(self):
        from slpspan.spanner import DeterminizationLimitError

        rng = random.Random(59)
        m = _random_plain_nfa(rng, "ab", 9)
        with pytest.raises(DeterminizationLimitError):
            determinize(m, subset_cap=1)


def _random_plain_nfa(rng: random.Random, alphabet: str, states: int) -> SpannerAutomaton:
    arcs = []
    for _ in range(states * 3):
        p = rng.randint(1, states)
        q = rng.randint(1, states)
        label = rng.choice(list(alphabet) + [EPSILON])
        arcs.append((p, label, q))
    accepting = [s for s in range(1, states + 1) if rng.random() < 0.4] or [states]
    return SpannerAutomaton(states, accepting, arcs, alphabet)


def _naive_accept(m: SpannerAutomaton, doc: str) -> bool:
    """Breadth-first path search over the raw arc list."""
    current = {1}
    changed = True
    while changed:  # epsilon closure by iteration
        changed = False
        for p, label, q in m.arcs:
            if label is EPSILON and p in current and q not in current:
                current.add(q)
                changed = True
    for ch in doc:
        nxt = set()
        for p, label, q in m.arcs:
            if label == ch and p in current:
                nxt.add(q)
        current = nxt
        changed = True
        while changed:
            changed = False
            for p, label, q in m.arcs:
                if label is EPSILON and p in current and q not in current:
                    current.add(q)
                    changed = True
    return bool(current & m.accepting)


def _all_marker_sets(variables, doc_len):
    """Every valid complete marker set over the variables and positions."""
    per_var = []
    for var in variables:
        options = [()]
        for i in range(1, doc_len + 2):
            for j in range(i, doc_len + 2):
                options.append(((open_marker(var), i), (close_marker(var), j)))
        per_var.append(options)
    for combo in itertools.product(*per_var):
        yield MarkerSet([pair for group in combo for pair in group])
