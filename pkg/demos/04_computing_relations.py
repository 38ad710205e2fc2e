"""Materializing the whole extracted relation from the compressed text.

Every nonterminal owns a matrix of marker-set lists: cell (i, j) holds
the partial tuples that carry the automaton from state i to state j
across that nonterminal's stretch of the document.  A rule A -> B C
combines cells by shifting the right part and joining, and sorted lists
keep every union duplicate-free without re-sorting.  Intermediate lists
provably never exceed the final relation's size.
"""

from slpspan import (
    ComputeStats,
    build_test_slp,
    compile_spanner_regex,
    compute_relation,
    format_tuple,
)

doc = "abaabcccabcab"
slp = build_test_slp(doc)
pattern = ".* x{ a b }x .* y{ c+ }y .*"
spanner = compile_spanner_regex(pattern, "abc", ["x", "y"])

print("document:", doc)
print("pattern:", pattern)

stats = ComputeStats()
relation = compute_relation(slp, spanner, stats=stats)
print("relation size:", len(relation))
for t in relation:
    print("  ", format_tuple(t, ["x", "y"]))

print("cells computed:", stats.cells_computed)
print("largest intermediate product:", stats.max_product_size)
print("bounded by result size:", stats.max_product_size <= stats.result_size)

# The output order is the marker-set order used internally: positions
# first, with shorter serializations sorting after their extensions.
print("\nfirst and last tuples:",
      format_tuple(relation[0], ["x", "y"]), "...",
      format_tuple(relation[-1], ["x", "y"]))

# On a repetitive compressed document the same work is shared across
# all occurrences of a factor.
big = build_test_slp("abaabcccabcab" * 1024)
print("\nrepeated 1024 times -> doc length", big.doc_length)
rel = compute_relation(big, compile_spanner_regex("(a|b|c)* x{ a b c }x c .*", "abc", ["x"]))
print("tuples of x{abc}c-spanner:", len(rel))
