"""Shared fixtures: worked examples and seeded random instance generators."""

from __future__ import annotations

import random

import pytest

from slpspan import (
    MarkerSet,
    Slp,
    SpannerAutomaton,
    Term,
    close_marker,
    compile_spanner_regex,
    load_slp,
    open_marker,
)

INTRO_PATTERN = "(b|c)* x{ a }x .* y{ c+ }y .*"
INTRO_DOC = "abcca"

NORMAL_FORM_TEXT = """
# the ten-character example document
start S0
S0 -> A B
A -> C D
B -> C E
C -> E T_b
D -> T_c T_c
E -> T_a T_a
T_a -> 'a'
T_b -> 'b'
T_c -> 'c'
"""

LONG_EXAMPLE_TEXT = """
start S0
S0 -> A 'b' 'a' A B 'b'
A -> B 'a' B
B -> 'b' 'a' 'a' 'b'
"""

LONG_EXAMPLE_DOC = "baababaabbabaababaabbaabb"


@pytest.fixture(scope="session")
def intro_spanner() -> SpannerAutomaton:
    return compile_spanner_regex(INTRO_PATTERN, "abc", ["x", "y"])


@pytest.fixture(scope="session")
def normal_form_slp() -> Slp:
    return load_slp(NORMAL_FORM_TEXT)


def make_six_state_dfa() -> SpannerAutomaton:
    """A 6-state DFA spanner over {a,b,c} and {x,y}.

    State 1 loops on all terminals; x opens into 2, spans at least one
    terminal through 3 and closes into the accepting sink 6; y opens
    into 4, spans a block of c through 5 and closes into 6.  Used by
    the enumeration worked example: e.g. reading aab keeps state 1 and
    only the unmarked run does so.
    """
    a, b, c = "abc"
    arcs = []
    for ch in (a, b, c):
        arcs.append((1, ch, 1))
        arcs.append((2, ch, 3))
        arcs.append((3, ch, 3))
        arcs.append((6, ch, 6))
    arcs.append((1, (open_marker("x"),), 2))
    arcs.append((3, (close_marker("x"),), 6))
    arcs.append((1, (open_marker("y"),), 4))
    arcs.append((4, c, 5))
    arcs.append((5, c, 5))
    arcs.append((5, (close_marker("y"),), 6))
    return SpannerAutomaton(6, (6,), arcs, "abc", ("x", "y"))


@pytest.fixture(scope="session")
def six_state_dfa() -> SpannerAutomaton:
    return make_six_state_dfa()


def chain_slp(char: str, power: int) -> Slp:
    """An SLP for char**(2**power) built from ``power + 1`` rules."""
    rules = {"T": Term(char)}
    prev = "T"
    for level in range(1, power + 1):
        rules["P%d" % level] = (prev, prev)
        prev = "P%d" % level
    return Slp(rules, prev)


def marker_set_from(pairs) -> MarkerSet:
    """(kind, var, pos) triples to a marker set; kind is 'open'/'close'."""
    entries = []
    for kind, var, pos in pairs:
        marker = open_marker(var) if kind == "open" else close_marker(var)
        entries.append((marker, pos))
    return MarkerSet(entries)


def random_slp(rng: random.Random, doc: str) -> Slp:
    """A structurally random normal-form SLP for ``doc``.

    Splits at random points and only sometimes shares repeated
    substrings, so derivation trees vary in shape and depth.
    """
    rules = {}
    taken = set()
    memo = {}
    counter = [0]
    share = rng.random() < 0.7

    def fresh(base):
        if base not in taken:
            taken.add(base)
            return base
        k = 1
        while "%s.%d" % (base, k) in taken:
            k += 1
        taken.add("%s.%d" % (base, k))
        return "%s.%d" % (base, k)

    def build(piece: str) -> str:
        if share and piece in memo:
            return memo[piece]
        if len(piece) == 1:
            name = memo.get(piece)
            if name is None:
                name = fresh("T_%s" % piece)
                rules[name] = Term(piece)
                memo[piece] = name
            return name
        cut = rng.randint(1, len(piece) - 1)
        left = build(piece[:cut])
        right = build(piece[cut:])
        counter[0] += 1
        name = fresh("N%d" % counter[0])
        rules[name] = (left, right)
        if share:
            memo[piece] = name
        return name

    return Slp(rules, build(doc))


def random_spanner_pattern(
    rng: random.Random, alphabet: str, variables: tuple[str, ...]
) -> str:
    """A random pattern in the spanner regex dialect.

    Valid by construction: concatenations hand each part a disjoint
    share of the variables, wrapped variables are removed from their
    body, and nothing under * or + may bind a variable.
    """

    def gen(depth: int, available: tuple[str, ...]) -> str:
        roll = rng.random()
        if depth <= 0 or roll < 0.3:
            return rng.choice(list(alphabet) + ["."])
        if roll < 0.55:
            width = rng.randint(2, 3)
            shares: list[list[str]] = [[] for _ in range(width)]
            for var in available:
                shares[rng.randrange(width)].append(var)
            return " ".join(gen(depth - 1, tuple(s)) for s in shares)
        if roll < 0.7:
            return "(%s|%s)" % (
                gen(depth - 1, available),
                gen(depth - 1, available),
            )
        if roll < 0.85 and available:
            var = rng.choice(list(available))
            rest = tuple(v for v in available if v != var)
            return "%s{ %s }%s" % (var, gen(depth - 1, rest), var)
        return "(%s)%s" % (gen(depth - 1, ()), rng.choice("*+?"))

    return gen(rng.randint(2, 4), tuple(variables))


def random_marker_set(
    rng: random.Random, variables, doc_length: int, *, allow_tail: bool = True
) -> MarkerSet:
    """A random valid (complete-per-variable) marker set for a document."""
    entries = []
    top = doc_length + 1 if allow_tail else doc_length
    for var in variables:
        if rng.random() < 0.5:
            continue
        start = rng.randint(1, top)
        end = rng.randint(start, top)
        entries.append((open_marker(var), start))
        entries.append((close_marker(var), end))
    return MarkerSet(entries)


def random_document(rng: random.Random, alphabet: str, max_length: int) -> str:
    length = rng.randint(1, max_length)
    return "".join(rng.choice(alphabet) for _ in range(length))
