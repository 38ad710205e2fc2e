"""Non-emptiness and model checking on the compressed document.

Both questions reduce to regular-language membership of the compressed
document, which one pass of Boolean matrix products answers without
decompression: roughly one q x q matrix product per grammar rule.
"""

import time

from slpspan import (
    SpanTuple,
    build_test_slp,
    check_nonempty,
    compile_spanner_regex,
    format_tuple,
    load_slp,
    model_check,
    slp_membership,
)

# A 2^30-character document in 35 rules: (ab)^(2^29) followed by c.
lines = ["start S", "P0 -> 'a' 'b'", "C -> 'c'"]
for k in range(1, 30):
    lines.append("P%d -> P%d P%d" % (k, k - 1, k - 1))
lines.append("S -> P29 C")
slp = load_slp("\n".join(lines))
print("document length:", slp.doc_length)

# Plain regular membership: does the document match (ab)* c ?
shape = compile_spanner_regex("(a b)* c", "abc", [])
start = time.perf_counter()
print("matches (ab)*c:", slp_membership(slp, shape))
print("  in %.4f seconds" % (time.perf_counter() - start))

# A spanner looking for the single c, with arbitrary padding.
finder = compile_spanner_regex(".* x{ c }x .*", "abc", ["x"])
start = time.perf_counter()
print("extracts something:", check_nonempty(slp, finder))
print("  in %.4f seconds" % (time.perf_counter() - start))

# Model checking: is this specific tuple extracted?  The marker symbols
# are pushed into the grammar along two root-to-leaf paths, then the
# marked grammar goes through the same membership machinery.
n = slp.doc_length
yes = SpanTuple({"x": (n, n + 1)})
no = SpanTuple({"x": (1, 2)})
start = time.perf_counter()
print("c spans %s: %s" % (format_tuple(yes, ["x"]), model_check(slp, finder, yes)))
print("c spans %s: %s" % (format_tuple(no, ["x"]), model_check(slp, finder, no)))
print("  both in %.4f seconds" % (time.perf_counter() - start))

# Small sanity on an uncompressed-size example.
small = build_test_slp("abcca")
print("\nsmall doc nonempty:", check_nonempty(small, finder))
