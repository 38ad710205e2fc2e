"""Sorted-list machinery and full relation computation."""

from __future__ import annotations

import random

import pytest

from slpspan import (
    ComputeStats,
    MarkerSet,
    MemoryCapError,
    SpanTuple,
    brute_force_relation,
    build_test_slp,
    check_nonempty,
    compare_marker_sets,
    compile_spanner_regex,
    compute_relation,
    merge_product,
    merge_union,
    model_check,
    tuple_to_marker_set,
)

from conftest import (
    marker_set_from,
    random_document,
    random_marker_set,
    random_slp,
    random_spanner_pattern,
)


def _ms(*pairs) -> MarkerSet:
    return marker_set_from(list(pairs))


class TestOrder:
    def test_prefix_is_larger(self):
        shorter = _ms(("open", "x", 1))
        longer = _ms(("open", "x", 1), ("close", "x", 2))
        assert compare_marker_sets(shorter, longer) == 1
        assert compare_marker_sets(longer, shorter) == -1

    def test_equal(self):
        assert compare_marker_sets(_ms(("open", "x", 3)), _ms(("open", "x", 3))) == 0

    def test_position_major(self):
        early = _ms(("close", "y", 1))
        late = _ms(("open", "x", 2))
        assert compare_marker_sets(early, late) == -1

    def test_marker_order_breaks_ties(self):
        open_x = _ms(("open", "x", 2))
        close_x = _ms(("close", "x", 2))
        open_y = _ms(("open", "y", 2))
        assert compare_marker_sets(open_x, close_x) == -1
        assert compare_marker_sets(close_x, open_y) == -1

    def test_empty_set_is_largest(self):
        assert compare_marker_sets(MarkerSet(), _ms(("open", "x", 9))) == 1

    def test_total_order_properties(self):
        rng = random.Random(301)
        pool = [random_marker_set(rng, ("x", "y"), 6) for _ in range(60)]
        for _ in range(10_000):
            a, b, c = rng.choice(pool), rng.choice(pool), rng.choice(pool)
            ab, bc, ac = (
                compare_marker_sets(a, b),
                compare_marker_sets(b, c),
                compare_marker_sets(a, c),
            )
            assert ab == -compare_marker_sets(b, a)
            if ab == 0:
                assert a == b
            if ab <= 0 and bc <= 0:
                assert ac <= 0
            assert compare_marker_sets(a, b) == _reference_compare(a, b)


def _reference_compare(a: MarkerSet, b: MarkerSet) -> int:
    """Element-by-element comparison straight from the order's definition."""
    sa = [(p,) + m.key for m, p in a]
    sb = [(p,) + m.key for m, p in b]
    for ea, eb in zip(sa, sb):
        if ea != eb:
            return -1 if ea < eb else 1
    if len(sa) == len(sb):
        return 0
    return 1 if len(sa) < len(sb) else -1  # the proper prefix is larger


class TestMergeProduct:
    def test_left_identity_shifts(self):
        right = [_ms(("open", "x", 1)), _ms(("open", "x", 2))]
        out = merge_product([MarkerSet()], right, 3)
        assert out == [_ms(("open", "x", 4)), _ms(("open", "x", 5))]

    def test_single_pair(self):
        out = merge_product([_ms(("open", "x", 1))], [_ms(("close", "x", 1))], 1)
        assert out == [_ms(("open", "x", 1), ("close", "x", 2))]

    def test_sorted_and_complete_on_random_lists(self):
        rng = random.Random(307)
        for _ in range(200):
            split = rng.randint(1, 6)
            left = sorted(
                {random_marker_set(rng, ("x",), split, allow_tail=False) for _ in range(4)},
                key=MarkerSet.sort_key,
            )
            right = sorted(
                {random_marker_set(rng, ("y", "z"), 5) for _ in range(4)},
                key=MarkerSet.sort_key,
            )
            out = merge_product(left, right, split)
            assert len(out) == len(left) * len(right)
            keys = [m.sort_key() for m in out]
            assert keys == sorted(keys)
            assert len(set(keys)) == len(keys)


class TestMergeUnion:
    def test_idempotent(self):
        lst = [_ms(("open", "x", 1)), MarkerSet()]
        assert merge_union([lst, lst]) == lst

    def test_empty_neutral(self):
        lst = [_ms(("open", "x", 1))]
        assert merge_union([lst, []]) == lst

    def test_against_set_union(self):
        rng = random.Random(311)
        for _ in range(200):
            lists = []
            for _ in range(rng.randint(1, 4)):
                group = {random_marker_set(rng, ("x", "y"), 4) for _ in range(rng.randint(0, 5))}
                lists.append(sorted(group, key=MarkerSet.sort_key))
            out = merge_union(lists)
            expected = sorted(
                {m for lst in lists for m in lst}, key=MarkerSet.sort_key
            )
            assert out == expected


class TestComputeRelation:
    def test_intro_relation(self, intro_spanner):
        tuples = compute_relation(build_test_slp("abcca"), intro_spanner)
        assert set(tuples) == {
            SpanTuple({"x": (1, 2), "y": (3, 4)}),
            SpanTuple({"x": (1, 2), "y": (4, 5)}),
            SpanTuple({"x": (1, 2), "y": (3, 5)}),
        }

    def test_output_is_sorted_and_duplicate_free(self, intro_spanner):
        tuples = compute_relation(build_test_slp("abcca"), intro_spanner)
        keys = [tuple_to_marker_set(t).sort_key() for t in tuples]
        assert keys == sorted(keys)
        assert len(set(keys)) == len(keys)

    def test_plain_regex_boolean_semantics(self):
        m = compile_spanner_regex("a (a|b)*", "ab", [])
        assert compute_relation(build_test_slp("abab"), m) == [SpanTuple({})]
        assert compute_relation(build_test_slp("bab"), m) == []

    def test_memory_cap(self, intro_spanner):
        with pytest.raises(MemoryCapError):
            compute_relation(
                build_test_slp("abcca"), intro_spanner, max_stored_sets=1
            )

    def test_against_oracle_corpus(self):
        rng = random.Random(313)
        checked = 0
        for _ in range(120):
            variables = ("x", "y")[: rng.randint(0, 2)]
            pattern = random_spanner_pattern(rng, "ab", variables)
            m = compile_spanner_regex(pattern, "ab", list(variables))
            doc = random_document(rng, "ab", 10)
            slp = random_slp(rng, doc)
            expected = brute_force_relation(doc, m)
            got = compute_relation(slp, m)
            assert len(got) == len(set(got))
            assert set(got) == expected, (pattern, doc)
            checked += 1
        assert checked == 120

    def test_intermediate_lists_bounded_by_result(self):
        rng = random.Random(331)
        for _ in range(60):
            variables = ("x", "y")[: rng.randint(1, 2)]
            pattern = random_spanner_pattern(rng, "ab", variables)
            m = compile_spanner_regex(pattern, "ab", list(variables))
            doc = random_document(rng, "ab", 12)
            slp = random_slp(rng, doc)
            stats = ComputeStats()
            compute_relation(slp, m, stats=stats)
            assert stats.max_product_size <= max(stats.result_size, 0) or (
                stats.result_size == 0 and stats.max_product_size == 0
            ), pattern

    def test_agreement_with_decision_procedures(self, intro_spanner):
        rng = random.Random(317)
        for _ in range(40):
            doc = random_document(rng, "abc", 10)
            slp = random_slp(rng, doc)
            relation = compute_relation(slp, intro_spanner)
            assert bool(relation) == check_nonempty(slp, intro_spanner)
            for t in relation[:5]:
                assert model_check(slp, intro_spanner, t)
