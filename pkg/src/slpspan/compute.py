"""Full materialization of a spanner's relation over a compressed document.

Sets of marker sets are kept as strictly sorted, duplicate-free lists
under a total order built for the purpose: elements of a marker set are
serialized position-major, and sequences compare at the leftmost
difference with a proper prefix counting as the *larger* word.  Under
that order, joining two sorted lists with a fixed shift preserves
sortedness without re-sorting, and k-way unions are plain merges.

The relation itself is assembled by a memoized recursion over the rule
DAG: each cell is the merged union, over its split states, of the
shifted products of its children's cells.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, Optional

from .matrices import RelationTables, precompute_tables
from .slp import Slp, append_sentinel
from .spanner import (
    MarkerSet,
    SpanTuple,
    SpannerAutomaton,
    fresh_sentinel,
    make_non_tail_spanning,
    marker_set_to_tuple,
)


class MemoryCapError(RuntimeError):
    """The configured bound on stored marker sets was exceeded."""


def compare_marker_sets(a: MarkerSet, b: MarkerSet) -> int:
    """-1, 0 or 1 under the prefix-is-larger sequence order."""
    ka, kb = a.sort_key(), b.sort_key()
    return -1 if ka < kb else (0 if ka == kb else 1)


def merge_product(
    left: list[MarkerSet], right: list[MarkerSet], split: int
) -> list[MarkerSet]:
    """All joins of one set from each list, right operand shifted by ``split``.

    Both inputs must be sorted; the nested loop emits the output already
    sorted and duplicate-free, with every element of ``left`` placing
    markers at or before ``split``.
    """
    out = []
    for lam_left in left:
        for lam_right in right:
            out.append(lam_left.join(lam_right, split))
    return out


def merge_union(lists: Iterable[list[MarkerSet]]) -> list[MarkerSet]:
    """K-way merge of sorted lists, discarding duplicates."""
    merged = heapq.merge(*lists, key=MarkerSet.sort_key)
    out = []
    for item in merged:
        if not out or out[-1] != item:
            out.append(item)
    return out


@dataclass
class ComputeStats:
    """Instrumentation hooks for the relation computation."""

    result_size: int = 0
    max_product_size: int = 0
    cells_computed: int = 0
    stored_sets: int = 0


def compute_marker_sets(
    tables: RelationTables,
    *,
    max_stored_sets: Optional[int] = None,
    stats: Optional[ComputeStats] = None,
) -> list[MarkerSet]:
    """The sorted union of the start cells of all live accepting states."""
    slp = tables.slp
    memo: dict[tuple, list[MarkerSet]] = {}
    budget = [0]

    def charge(amount: int):
        budget[0] += amount
        if max_stored_sets is not None and budget[0] > max_stored_sets:
            raise MemoryCapError(
                "more than %d marker sets stored during computation"
                % max_stored_sets
            )

    def cell(nt: str, i: int, j: int) -> list[MarkerSet]:
        key = (nt, i, j)
        value = memo.get(key)
        if value is not None:
            return value
        if slp.is_leaf(nt):
            value = tables.leaf_list(slp.leaf_symbol(nt), i, j)
        else:
            left, right = slp.rules[nt]
            shift = tables.right_shift_of(nt)
            parts = []
            for k in tables.split_states(nt, i, j):
                part = merge_product(cell(left, i, k), cell(right, k, j), shift)
                if stats is not None and len(part) > stats.max_product_size:
                    stats.max_product_size = len(part)
                parts.append(part)
            value = merge_union(parts)
        charge(len(value))
        if stats is not None:
            stats.cells_computed += 1
        memo[key] = value
        return value

    result = merge_union(
        [cell(slp.start, 1, j) for j in tables.accepting_reachable]
    )
    if stats is not None:
        stats.result_size = len(result)
        stats.stored_sets = budget[0]
    return result


def compute_relation(
    slp: Slp,
    automaton: SpannerAutomaton,
    *,
    max_stored_sets: Optional[int] = None,
    stats: Optional[ComputeStats] = None,
) -> list[SpanTuple]:
    """Every extracted span-tuple, sorted by the marker-set order.

    The sentinel transform is applied internally; the reported positions
    are relative to the original document.
    """
    doc_length = slp.doc_length
    sentinel = fresh_sentinel(automaton.alphabet)
    tables = precompute_tables(
        append_sentinel(slp, sentinel), make_non_tail_spanning(automaton, sentinel)
    )
    marker_sets = compute_marker_sets(
        tables, max_stored_sets=max_stored_sets, stats=stats
    )
    return [marker_set_to_tuple(m, doc_length) for m in marker_sets]
