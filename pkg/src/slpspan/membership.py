"""Membership of SLP-compressed documents in regular languages.

The document is never expanded: one Boolean reachability matrix per
nonterminal, with the matrix of ``A -> B C`` the Boolean product of its
children's matrices.  Rows are packed into integers (state s occupies
bit ``1 << s``), so a product row is a fold of bitwise ORs over the set
bits of the left row.

Non-emptiness and model checking of spanners reduce to this: the former
by reading every marker-set transition as epsilon, the latter by pushing
the tuple's markers into the grammar and reading marker-set symbols as
ordinary letters.
"""

from __future__ import annotations

from .slp import Slp, Term, insert_markers_into_slp
from .spanner import (
    EPSILON,
    SpanTuple,
    SpannerAutomaton,
    eliminate_epsilon,
    tuple_to_marker_set,
)


def _product_row(row: int, right_rows: list[int]) -> int:
    out = 0
    while row:
        low = row & -row
        out |= right_rows[low.bit_length() - 1]
        row ^= low
    return out


def _bool_product(left: list[int], right: list[int]) -> list[int]:
    return [0] + [_product_row(row, right) for row in left[1:]]


def slp_membership(slp: Slp, automaton: SpannerAutomaton) -> bool:
    """Whether the derived document lies in L(M), in one bottom-up pass.

    Terminals of the SLP that the automaton does not know act as dead
    letters (all-zero leaf matrices).
    """
    nfa = eliminate_epsilon(automaton)
    q = nfa.state_count
    leaf_rows: dict[object, list[int]] = {}
    for p, label, target in nfa.arcs:
        rows = leaf_rows.get(label)
        if rows is None:
            rows = [0] * (q + 1)
            leaf_rows[label] = rows
        rows[p] |= 1 << target
    dead = [0] * (q + 1)
    matrices: dict[str, list[int]] = {}
    for nt in slp.topo_order:
        body = slp.rules[nt]
        if isinstance(body, Term):
            matrices[nt] = leaf_rows.get(body.symbol, dead)
        else:
            matrices[nt] = _bool_product(matrices[body[0]], matrices[body[1]])
    return bool(matrices[slp.start][1] & nfa.accept_mask())


def check_nonempty(slp: Slp, automaton: SpannerAutomaton) -> bool:
    """Whether the spanner extracts at least one tuple from the document.

    Marker-set transitions are demoted to epsilon transitions, which
    reduces the question to plain membership of the document.
    """
    arcs = [
        (p, EPSILON if not isinstance(label, str) and label is not EPSILON else label, t)
        for p, label, t in automaton.arcs
    ]
    skeleton = SpannerAutomaton(
        automaton.state_count,
        automaton.accepting,
        arcs,
        automaton.alphabet,
        automaton.variables,
    )
    return slp_membership(slp, skeleton)


def model_check(slp: Slp, automaton: SpannerAutomaton, t: SpanTuple) -> bool:
    """Whether span-tuple ``t`` is extracted from the compressed document.

    Builds a grammar for the marked document and checks its membership,
    with marker-set symbols read as letters.
    """
    n = slp.doc_length
    for var, start, end in t.spans:
        if end > n + 1:
            raise ValueError(
                "span %s=[%d,%d> incompatible with document length %d"
                % (var, start, end, n)
            )
    marked = insert_markers_into_slp(slp, tuple_to_marker_set(t))
    return slp_membership(marked, automaton)
