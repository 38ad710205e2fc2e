"""Bounded-delay enumeration of a spanner's relation over an SLP.

The unit of enumeration is a small ordered binary tree over relation
cells: an inner node fixes a nonterminal, a state pair and a split
state; leaves are either blank cells (contributing nothing) or leaf
cells (contributing their precomputed marker-set lists).  The arc
toward a right child carries the left sibling's derived length, so a
root-to-leaf path accumulates the shift that relocates that leaf's
markers into the whole document.

Trees are produced by three nested loops of suspended recursive
producers, and each tree's yield is traversed with one cursor per
terminal leaf.  On a deterministic automaton the emitted tuples are
pairwise distinct across trees, split states and accepting states.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Iterator, Optional

from .matrices import Reach, RelationTables, precompute_tables
from .slp import Slp, append_sentinel
from .spanner import (
    EMPTY_MARKER_SET,
    MarkerSet,
    SpanTuple,
    SpannerAutomaton,
    determinize,
    fresh_sentinel,
    make_non_tail_spanning,
    marker_set_to_tuple,
)

log = logging.getLogger(__name__)

DEFAULT_SUBSET_CAP = 1 << 20

INNER = "inner"
EMPTY_LEAF = "empty"
TERMINAL_LEAF = "terminal"


class StepCounter:
    """Counts elementary producer steps, for delay instrumentation."""

    __slots__ = ("steps",)

    def __init__(self):
        self.steps = 0

    def tick(self):
        self.steps += 1


@dataclass(frozen=True)
class MTree:
    """One enumeration tree node; whole trees share subtrees structurally."""

    kind: str
    nt: str
    i: int
    j: int
    k: Optional[int] = None
    left: Optional["MTree"] = None
    right: Optional["MTree"] = None
    right_shift: int = 0

    @classmethod
    def empty_leaf(cls, nt: str, i: int, j: int) -> "MTree":
        return cls(EMPTY_LEAF, nt, i, j)

    @classmethod
    def terminal_leaf(cls, nt: str, i: int, j: int) -> "MTree":
        return cls(TERMINAL_LEAF, nt, i, j)

    @classmethod
    def inner(
        cls, nt: str, i: int, k: int, j: int, left: "MTree", right: "MTree",
        right_shift: int,
    ) -> "MTree":
        return cls(INNER, nt, i, j, k, left, right, right_shift)

    def node_count(self) -> int:
        if self.kind != INNER:
            return 1
        return 1 + self.left.node_count() + self.right.node_count()

    def terminal_leaves(self) -> list[tuple["MTree", int]]:
        """Terminal leaves left-to-right with their accumulated shifts."""
        out: list[tuple[MTree, int]] = []

        def walk(node: "MTree", shift: int):
            if node.kind == TERMINAL_LEAF:
                out.append((node, shift))
            elif node.kind == INNER:
                walk(node.left, shift)
                walk(node.right, shift + node.right_shift)

        walk(self, 0)
        return out

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        if self.kind == EMPTY_LEAF:
            return "<%s,%d,%d>^e" % (self.nt, self.i, self.j)
        if self.kind == TERMINAL_LEAF:
            return "<%s,%d,%d>^T" % (self.nt, self.i, self.j)
        return "<%s,%d,%d,%d>(%r,0)(%r,%d)" % (
            self.nt, self.i, self.k, self.j, self.left, self.right,
            self.right_shift,
        )


def enum_trees(
    tables: RelationTables,
    nt: str,
    i: int,
    k: Optional[int],
    j: int,
    counter: Optional[StepCounter] = None,
) -> Iterator[MTree]:
    """All enumeration trees rooted at the given cell and split state.

    ``k`` must come from the cell's branch options: ``None`` selects the
    single-node base case of blank cells and leaf nonterminals, an
    intermediate state selects the inner-node case.  Every tree is
    produced exactly once; producers suspend between outputs.
    """
    if k is None:
        if counter is not None:
            counter.tick()
        if tables.reach(nt, i, j) is Reach.BLANK_ONLY:
            yield MTree.empty_leaf(nt, i, j)
        else:
            yield MTree.terminal_leaf(nt, i, j)
        return
    left, right = tables.slp.rules[nt]
    shift = tables.right_shift_of(nt)
    for k_left in tables.branch_options(left, i, k):
        for k_right in tables.branch_options(right, k, j):
            if counter is not None:
                counter.tick()
            for tree_left in enum_trees(tables, left, i, k_left, k, counter):
                if counter is not None:
                    counter.tick()
                for tree_right in enum_trees(tables, right, k, k_right, j, counter):
                    if counter is not None:
                        counter.tick()
                    yield MTree.inner(nt, i, k, j, tree_left, tree_right, shift)


def enum_tree_yield(
    tables: RelationTables,
    tree: MTree,
    counter: Optional[StepCounter] = None,
) -> Iterator[MarkerSet]:
    """The yield of one tree: every combination of its leaf marker sets.

    Preprocessing walks the tree once, caching each terminal leaf's
    total shift and a handle on its sorted leaf list; the enumeration
    then runs one cursor per leaf, emitting the union of the shifted
    picks.
    """
    leaves = tree.terminal_leaves()
    if not leaves:
        if counter is not None:
            counter.tick()
        yield EMPTY_MARKER_SET
        return
    slp = tables.slp
    lists = []
    for node, shift in leaves:
        group = tables.leaf_list(slp.leaf_symbol(node.nt), node.i, node.j)
        lists.append([m.shift(shift) for m in group])
    width = len(lists)
    cursor = [0] * width
    while True:
        if counter is not None:
            counter.tick()
        entries = []
        for idx in range(width):
            entries.extend(lists[idx][cursor[idx]].entries)
        yield MarkerSet(entries)
        pos = width - 1
        while pos >= 0:
            cursor[pos] += 1
            if cursor[pos] < len(lists[pos]):
                break
            cursor[pos] = 0
            pos -= 1
            if counter is not None:
                counter.tick()
        if pos < 0:
            return


def enumerate_relation(
    slp: Slp,
    automaton: SpannerAutomaton,
    *,
    allow_duplicates: bool = False,
    subset_cap: int = DEFAULT_SUBSET_CAP,
    counter: Optional[StepCounter] = None,
    on_tree: Optional[Callable[[MTree], None]] = None,
) -> Iterator[SpanTuple]:
    """Stream every extracted span-tuple of the compressed document.

    Nondeterministic automata are determinized up front (exponential in
    the worst case, hence the logged warning); with ``allow_duplicates``
    the automaton is used as given and tuples may repeat.  Roots are
    visited with accepting states ascending, then split states
    ascending; ``on_tree`` observes every produced tree.
    """
    if not automaton.deterministic and not allow_duplicates:
        log.warning(
            "determinizing a %d-state automaton for duplicate-free "
            "enumeration; this may be exponential",
            automaton.state_count,
        )
        automaton = determinize(automaton, subset_cap=subset_cap)
    doc_length = slp.doc_length
    sentinel = fresh_sentinel(automaton.alphabet)
    tables = precompute_tables(
        append_sentinel(slp, sentinel), make_non_tail_spanning(automaton, sentinel)
    )
    start = tables.slp.start
    for j in tables.accepting_reachable:
        for k in tables.branch_options(start, 1, j):
            if counter is not None:
                counter.tick()
            for tree in enum_trees(tables, start, 1, k, j, counter):
                if on_tree is not None:
                    on_tree(tree)
                for marker_set in enum_tree_yield(tables, tree, counter):
                    yield marker_set_to_tuple(marker_set, doc_length)
