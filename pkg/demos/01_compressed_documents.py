"""Straight-line programs: documents as grammars.

An SLP is a context-free grammar that derives exactly one string.  The
grammar can be exponentially smaller than the string, yet lengths,
random access and membership queries all work without decompressing.
"""

from slpspan import (
    build_test_slp,
    char_at,
    depth_of,
    derived_lengths,
    expand,
    parse_slp,
    normalize,
)

# A grammar in the text format: quoted items are terminals, bare names
# are nonterminals.  This one is the classic small example: 16 grammar
# symbols for a 25-character document.
text = """
start S0
S0 -> A 'b' 'a' A B 'b'
A -> B 'a' B
B -> 'b' 'a' 'a' 'b'
"""

raw = parse_slp(text)
print("grammar size:", raw.size)

slp = normalize(raw)  # binarize + one leaf nonterminal per letter
print("document:", expand(slp))
print("document length:", slp.doc_length)
print("lengths per nonterminal:", {nt: n for nt, n in derived_lengths(slp).items()
                                   if not nt.startswith("T_")})

# Random access descends the derivation tree using the cached lengths;
# it never builds the document.
print("10th character:", char_at(slp, 10))

# Exponential compression: a**(2**40) in 41 rules.
doc = "a" * (2 ** 20)
tiny = build_test_slp(doc)
print("a^(2^20):", len(tiny.nonterminals), "nonterminals, depth", depth_of(tiny))
print("char at position 1000000:", char_at(tiny, 1_000_000))

# build_test_slp shares identical substrings, so repetitive text
# collapses; random text stays linear but balanced.
messy = build_test_slp("the cat sat on the mat " * 4)
print("repetitive text:", len(messy.nonterminals), "nonterminals for",
      messy.doc_length, "characters")
