"""Per-nonterminal relation tables feeding computation and enumeration.

For every nonterminal A and state pair (i, j) the set of partial marker
sets that drive the automaton from i to j across A's derived factor is
classified three-ways: empty, exactly the unmarked run, or containing a
genuinely marked run.  The classification is stored as two parallel bit
planes (two bits per cell): ``nb`` marks cells with any run at all and
``dm`` marks cells with a marked run.  Split-state sets are bitsets
derived from the children's planes on demand.

Leaf cells are materialized explicitly: each is the sorted list of the
single-position marker sets that can precede one terminal, built in one
pass over the automaton's transitions.
"""

from __future__ import annotations

import enum
import logging
from typing import Optional

from .slp import Slp, Term
from .spanner import (
    EMPTY_MARKER_SET,
    MarkerSet,
    SpannerAutomaton,
    eliminate_epsilon,
)

log = logging.getLogger(__name__)


class Reach(enum.Enum):
    """Three-valued summary of one relation-table cell."""

    NONE = 0        # no run at all
    BLANK_ONLY = 1  # exactly the unmarked run
    MARKED = 2      # at least one run that places markers


class RelationTables:
    """Immutable evaluation tables for one (SLP, automaton) pair."""

    __slots__ = (
        "slp",
        "automaton",
        "state_count",
        "leaf_sets",
        "accepting_reachable",
        "build_word_ops",
        "_nb",
        "_dm",
        "_nbt",
    )

    def __init__(
        self,
        slp: Slp,
        automaton: SpannerAutomaton,
        leaf_sets: dict,
        nb: dict,
        dm: dict,
        nbt: dict,
        accepting_reachable: tuple,
        build_word_ops: int,
    ):
        object.__setattr__(self, "slp", slp)
        object.__setattr__(self, "automaton", automaton)
        object.__setattr__(self, "state_count", automaton.state_count)
        object.__setattr__(self, "leaf_sets", leaf_sets)
        object.__setattr__(self, "_nb", nb)
        object.__setattr__(self, "_dm", dm)
        object.__setattr__(self, "_nbt", nbt)
        object.__setattr__(self, "accepting_reachable", accepting_reachable)
        object.__setattr__(self, "build_word_ops", build_word_ops)

    def __setattr__(self, name, value):
        raise AttributeError("RelationTables is immutable")

    def reach(self, nt: str, i: int, j: int) -> Reach:
        if not self._nb[nt][i] >> j & 1:
            return Reach.NONE
        if self._dm[nt][i] >> j & 1:
            return Reach.MARKED
        return Reach.BLANK_ONLY

    def split_mask(self, nt: str, i: int, j: int) -> int:
        """Bitset of intermediate states of inner cell (nt, i, j)."""
        left, right = self.slp.rules[nt]
        return self._nb[left][i] & self._nbt[right][j]

    def split_states(self, nt: str, i: int, j: int) -> list[int]:
        mask = self.split_mask(nt, i, j)
        out = []
        while mask:
            low = mask & -mask
            out.append(low.bit_length() - 1)
            mask ^= low
        return out

    def branch_options(self, nt: str, i: int, j: int) -> list[Optional[int]]:
        """Split states of a cell, or ``[None]`` for base-case cells.

        ``None`` plays the role of the base-case marker: leaf cells and
        blank-only cells terminate the recursion.
        """
        reach = self.reach(nt, i, j)
        if reach is Reach.NONE:
            raise ValueError("cell (%s, %d, %d) has no runs" % (nt, i, j))
        if reach is Reach.BLANK_ONLY or self.slp.is_leaf(nt):
            return [None]
        return self.split_states(nt, i, j)

    def leaf_list(self, symbol, i: int, j: int) -> list[MarkerSet]:
        return self.leaf_sets.get((symbol, i, j), [])

    def right_shift_of(self, nt: str) -> int:
        """Arc label toward the right child: the left child's length."""
        left, _ = self.slp.rules[nt]
        return self.slp.derived_lengths[left]


def _transpose(rows: list[int], q: int) -> list[int]:
    cols = [0] * (q + 1)
    for i in range(1, q + 1):
        m = rows[i]
        bit = 1 << i
        while m:
            low = m & -m
            cols[low.bit_length() - 1] |= bit
            m ^= low
    return cols


def precompute_tables(
    slp: Slp, automaton: SpannerAutomaton, *, debug: bool = False
) -> RelationTables:
    """Build all relation tables bottom-up over the rule DAG.

    The automaton is epsilon-eliminated first.  Evaluation pipelines
    hand in sentinel-transformed inputs; with ``debug`` set, automata
    that could still accept tail-spanning words are flagged.
    """
    nfa = eliminate_epsilon(automaton)
    q = nfa.state_count
    if debug:
        for p, label, t in nfa.arcs:
            if not isinstance(label, str) and t in nfa.accepting:
                log.warning(
                    "accepting state %d has an incoming marker-set arc; "
                    "the language may be tail-spanning",
                    t,
                )
                break

    # Predecessor sets over marker-set arcs, then one pass over the
    # terminal arcs builds every leaf cell.
    preds: dict[int, set] = {}
    for p, label, t in nfa.arcs:
        if not isinstance(label, str):
            preds.setdefault(t, set()).add((p, label))
    cells: dict[tuple, set] = {}
    for p, label, t in nfa.arcs:
        if not isinstance(label, str):
            continue
        cells.setdefault((label, p, t), set()).add(EMPTY_MARKER_SET)
        for source, marker_label in preds.get(p, ()):
            cells.setdefault((label, source, t), set()).add(
                MarkerSet.from_label(marker_label, 1)
            )
    leaf_sets = {
        key: sorted(group, key=MarkerSet.sort_key) for key, group in cells.items()
    }

    nb: dict[str, list[int]] = {}
    dm: dict[str, list[int]] = {}
    nbt: dict[str, list[int]] = {}
    ops = 0
    for nt in slp.topo_order:
        body = slp.rules[nt]
        if isinstance(body, Term):
            nb_rows = [0] * (q + 1)
            dm_rows = [0] * (q + 1)
            for (symbol, i, j), group in leaf_sets.items():
                if symbol != body.symbol:
                    continue
                nb_rows[i] |= 1 << j
                if any(group_set for group_set in group):
                    dm_rows[i] |= 1 << j
        else:
            left, right = body
            nb_left, nb_right = nb[left], nb[right]
            dm_left, dm_right = dm[left], dm[right]
            nb_rows = [0] * (q + 1)
            dm_rows = [0] * (q + 1)
            for i in range(1, q + 1):
                row = 0
                m = nb_left[i]
                while m:
                    low = m & -m
                    row |= nb_right[low.bit_length() - 1]
                    m ^= low
                    ops += 1
                nb_rows[i] = row
                row = 0
                m = dm_left[i]
                while m:
                    low = m & -m
                    row |= nb_right[low.bit_length() - 1]
                    m ^= low
                    ops += 1
                m = nb_left[i]
                while m:
                    low = m & -m
                    row |= dm_right[low.bit_length() - 1]
                    m ^= low
                    ops += 1
                dm_rows[i] = row
        nb[nt] = nb_rows
        dm[nt] = dm_rows
        nbt[nt] = _transpose(nb_rows, q)

    start_row = nb[slp.start][1]
    reachable = tuple(sorted(j for j in nfa.accepting if start_row >> j & 1))
    return RelationTables(slp, nfa, leaf_sets, nb, dm, nbt, reachable, ops)
