"""Streaming the relation with bounded delay.

Instead of materializing anything, the enumerator walks small binary
trees over the relation tables: each tree fixes one way the automaton's
run decomposes along the grammar, and the tree's leaves hold the
marker-set choices.  A tree has at most 2|X| marker-carrying leaves and
O(|X| * depth) nodes, so consecutive outputs are separated by work
proportional to the grammar depth, not the document length.
"""

from slpspan import (
    StepCounter,
    build_test_slp,
    compile_spanner_regex,
    determinize,
    enumerate_relation,
    format_tuple,
)

doc = "abcabccabccc" * 32
slp = build_test_slp(doc)
spanner = determinize(
    compile_spanner_regex("(a|b|c)* x{ a b }x y{ c+ }y (a|b|c)*", "abc", ["x", "y"])
)
print("document length:", slp.doc_length, "- grammar depth:", slp.depth)

counter = StepCounter()
trees = []
stream = enumerate_relation(slp, spanner, counter=counter, on_tree=trees.append)

marks = []
first = []
for t in stream:
    marks.append(counter.steps)
    if len(first) < 5:
        first.append(t)

gaps = [marks[0]] + [b - a for a, b in zip(marks, marks[1:])]
print("tuples streamed:", len(marks))
print("first few:", ", ".join(format_tuple(t, ["x", "y"]) for t in first))
print("trees visited:", len(trees))
print("largest tree:", max(t.node_count() for t in trees), "nodes,",
      max(len(t.terminal_leaves()) for t in trees), "marker leaves")
print("producer steps per output: max", max(gaps), "avg %.1f" % (sum(gaps) / len(gaps)))
print("depth * |X| =", slp.depth * 2, " (the delay scale)")

# The trees themselves are inspectable values.
sample = max(trees, key=lambda t: t.node_count())
print("\na largest tree:")
print(" ", sample)
