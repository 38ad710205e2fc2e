"""Evaluation cost scales with the grammar, not the document.

The same spanner is evaluated on documents of doubling size given by
grammars of linearly growing size.  Direct evaluation stays flat while
expand-then-evaluate grows with the document until it becomes
impossible: the last document here has 2^41 + 1 characters.
"""

import time

from slpspan import (
    build_test_slp,
    check_nonempty,
    compile_spanner_regex,
    compute_relation,
    expand,
    format_tuple,
    load_slp,
)

spanner = compile_spanner_regex("a* x{ b }x a*", "ab", ["x"])


def padded_b_slp(power: int):
    """a^(2^power) b a^(2^power) in about power + 4 rules."""
    lines = ["start S", "A0 -> 'a'", "B -> 'b'"]
    for k in range(1, power + 1):
        lines.append("A%d -> A%d A%d" % (k, k - 1, k - 1))
    lines.append("T -> B A%d" % power)
    lines.append("S -> A%d T" % power)
    return load_slp("\n".join(lines))


print("%6s %16s %12s %12s" % ("rules", "doc length", "direct", "expanded"))
for power in (10, 14, 18):
    slp = padded_b_slp(power)
    start = time.perf_counter()
    direct = compute_relation(slp, spanner)
    t_direct = time.perf_counter() - start
    start = time.perf_counter()
    doc = expand(slp, limit=2 ** 20 + 10)
    rebuilt = build_test_slp(doc)
    via_text = compute_relation(rebuilt, spanner)
    t_text = time.perf_counter() - start
    assert direct == via_text
    print("%6d %16d %10.4fs %10.4fs"
          % (len(slp.nonterminals), slp.doc_length, t_direct, t_text))

# And far beyond anything that could be decompressed:
slp = padded_b_slp(40)
start = time.perf_counter()
assert check_nonempty(slp, spanner)
relation = compute_relation(slp, spanner)
t_direct = time.perf_counter() - start
print("%6d %16d %10.4fs %12s" % (len(slp.nonterminals), slp.doc_length, t_direct, "-"))
print("\nthe unique tuple:", format_tuple(relation[0], ["x"]))
print("(the b sits at position 2^40 + 1 = %d)" % (2 ** 40 + 1))
