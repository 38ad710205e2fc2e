"""Document spanners: extracting span relations with marked words.

A spanner maps a document to a relation of span-tuples.  A document
plus one tuple is encoded as a *marked word*: marker-set symbols such
as {open(x)} interleaved with the characters.  Spanners are then just
regular languages of marked words, given by automata or by a regex
dialect with variable brackets x{ ... }x.
"""

from slpspan import (
    MarkerSet,
    SpanTuple,
    accepts,
    brute_force_relation,
    compile_spanner_regex,
    determinize,
    format_tuple,
    insert_markers,
    markers_of,
    open_marker,
    close_marker,
    tuple_to_marker_set,
    word_of,
)

# A tuple assigns spans [start, end> to some variables; others stay
# undefined.  Its marker set places open/close markers at positions.
t = SpanTuple({"x": (6, 8), "z": (3, 8)})
print("tuple:", format_tuple(t, ["x", "y", "z"]))
markers = tuple_to_marker_set(t)
print("marker set:", markers)

w = insert_markers("aaabcbb", markers)
print("marked word:", w)
print("its document:", word_of(w))
print("round-trips:", markers_of(w) == markers)

# The introductory spanner: x spans the first 'a' after a (b|c)* prefix,
# y spans a non-empty block of c's somewhere after it.
pattern = "(b|c)* x{ a }x .* y{ c+ }y .*"
nfa = compile_spanner_regex(pattern, "abc", ["x", "y"])
print("\npattern:", pattern)
print("compiled NFA:", nfa.state_count, "states,", nfa.size, "transitions")

# Acceptance reads marker-set symbols as single letters.
one_tuple = MarkerSet(
    [(open_marker("x"), 1), (close_marker("x"), 2),
     (open_marker("y"), 3), (close_marker("y"), 5)]
)
print("accepts marked abcca:", accepts(nfa, insert_markers("abcca", one_tuple)))

# The whole relation on a small document, straight from the definition.
relation = brute_force_relation("abcca", nfa)
for t in sorted(relation, key=lambda s: tuple_to_marker_set(s).sort_key()):
    print("  extracted:", format_tuple(t, ["x", "y"]))

# Enumeration needs a DFA; subset construction over the letters and
# marker sets that actually occur.
dfa = determinize(nfa)
print("determinized:", dfa.state_count, "states, deterministic =", dfa.deterministic)
