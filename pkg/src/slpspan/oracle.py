"""Brute-force spanner evaluation on the uncompressed document.

Ground truth for every property test: a span-tuple is extracted exactly
when inserting its markers into the document yields a word the
automaton accepts.  The candidate space is walked exhaustively, so this
is only usable for small documents and few variables, and it shares
nothing with the compressed evaluation pipelines beyond the automaton
itself.
"""

from __future__ import annotations

from typing import Iterator

from .spanner import (
    SpanTuple,
    SpannerAutomaton,
    accepts,
    fresh_sentinel,
    insert_markers,
    make_non_tail_spanning,
    tuple_to_marker_set,
)


class CandidateSpace:
    """All partial assignments of the variables to spans of a document."""

    def __init__(self, doc_length: int, variables: tuple[str, ...]):
        self.doc_length = doc_length
        self.variables = tuple(variables)
        self.spans = [None] + [
            (i, j)
            for i in range(1, doc_length + 2)
            for j in range(i, doc_length + 2)
        ]

    def cardinality(self) -> int:
        return len(self.spans) ** len(self.variables)

    def __iter__(self) -> Iterator[SpanTuple]:
        variables = self.variables
        if not variables:
            yield SpanTuple({})
            return

        def fill(index: int, acc: list):
            if index == len(variables):
                yield SpanTuple(list(acc))
                return
            var = variables[index]
            for span in self.spans:
                if span is not None:
                    acc.append((var, span))
                yield from fill(index + 1, acc)
                if span is not None:
                    acc.pop()

        yield from fill(0, [])


def brute_force_relation(
    doc: str,
    automaton: SpannerAutomaton,
    *,
    max_length: int = 40,
    max_variables: int = 3,
) -> set[SpanTuple]:
    """Every candidate tuple whose marked document the automaton accepts.

    The sentinel transform is applied here exactly as in the evaluation
    pipelines, so both sides probe the same language.
    """
    if len(doc) > max_length:
        raise ValueError("document length %d exceeds bound %d" % (len(doc), max_length))
    if len(automaton.variables) > max_variables:
        raise ValueError(
            "%d variables exceed bound %d"
            % (len(automaton.variables), max_variables)
        )
    sentinel = fresh_sentinel(automaton.alphabet)
    probe = make_non_tail_spanning(automaton, sentinel)
    padded = doc + sentinel
    out = set()
    for candidate in CandidateSpace(len(doc), automaton.variables):
        marked = insert_markers(padded, tuple_to_marker_set(candidate))
        if accepts(probe, marked):
            out.add(candidate)
    return out
