"""Straight-line programs: grammars deriving exactly one document.

An SLP in normal form has only rules ``A -> B C`` and leaf rules
``T_x -> x`` with one leaf nonterminal per terminal symbol.  Terminal
symbols are usually single characters, but marker-set symbols act as
terminals too once markers have been pushed into a grammar, so rules
store terminals behind a small wrapper rather than as bare strings.

Everything here is position-exact on the *derived* document without
materializing it; expansion is available as an explicitly limited
operation for oracles and debugging.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Union

from .spanner import MarkerSet, is_label, label_text


class GrammarError(ValueError):
    """Structural problem with a grammar."""


class SlpFormatError(GrammarError):
    """Malformed SLP text; message carries the line number."""


class ExpandLimitError(RuntimeError):
    """Expansion would exceed the caller-supplied limit."""


@dataclass(frozen=True)
class Term:
    """A terminal occurrence on a right-hand side."""

    symbol: object  # a character, or a marker-set label

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return "Term(%r)" % (self.symbol,)


RuleBody = Union[Term, tuple]  # Term | (left_nt, right_nt)


class RawGrammar:
    """A parsed grammar before normalization: acyclic, arbitrary arities."""

    __slots__ = ("rules", "start")

    def __init__(self, rules: Mapping[str, tuple], start: str):
        rules = {nt: tuple(body) for nt, body in rules.items()}
        if start not in rules:
            raise GrammarError("start symbol %r has no rule" % start)
        for nt, body in rules.items():
            if not body:
                raise GrammarError("empty right-hand side for %r" % nt)
            for item in body:
                if isinstance(item, str):
                    if item not in rules:
                        raise GrammarError("undefined symbol %r in rule of %r" % (item, nt))
                elif not isinstance(item, Term):
                    raise GrammarError("bad item %r in rule of %r" % (item, nt))
        object.__setattr__(self, "rules", rules)
        object.__setattr__(self, "start", start)
        self._topological()  # raises on cycles

    def __setattr__(self, name, value):
        raise AttributeError("RawGrammar is immutable")

    @property
    def size(self) -> int:
        """Grammar size: nonterminal count plus total rule length."""
        return len(self.rules) + sum(len(b) for b in self.rules.values())

    def _topological(self) -> list[str]:
        order: list[str] = []
        state: dict[str, int] = {}  # 1 = on stack, 2 = done

        def visit(nt: str):
            stack = [(nt, iter(self.rules[nt]))]
            state[nt] = 1
            while stack:
                cur, it = stack[-1]
                advanced = False
                for item in it:
                    if isinstance(item, str):
                        mark = state.get(item)
                        if mark == 1:
                            raise GrammarError("cyclic rule graph through %r" % item)
                        if mark is None:
                            state[item] = 1
                            stack.append((item, iter(self.rules[item])))
                            advanced = True
                            break
                if not advanced:
                    state[cur] = 2
                    order.append(cur)
                    stack.pop()

        for nt in self.rules:
            if state.get(nt) is None:
                visit(nt)
        return order

    def is_normal_form(self) -> bool:
        leaves_seen = set()
        for body in self.rules.values():
            if len(body) == 1 and isinstance(body[0], Term):
                if body[0].symbol in leaves_seen:
                    return False
                leaves_seen.add(body[0].symbol)
            elif not (len(body) == 2 and all(isinstance(i, str) for i in body)):
                return False
        return True


class Slp:
    """A normal-form SLP with cached derived lengths and depths."""

    __slots__ = (
        "rules",
        "start",
        "nonterminals",
        "terminal_alphabet",
        "derived_lengths",
        "depths",
        "leaf_for",
        "topo_order",
    )

    def __init__(self, rules: Mapping[str, RuleBody], start: str):
        rules = dict(rules)
        if start not in rules:
            raise GrammarError("start symbol %r has no rule" % start)
        leaf_for: dict[object, str] = {}
        for nt, body in rules.items():
            if isinstance(body, Term):
                if body.symbol in leaf_for:
                    raise GrammarError(
                        "two leaf nonterminals (%r, %r) for terminal %r"
                        % (leaf_for[body.symbol], nt, body.symbol)
                    )
                leaf_for[body.symbol] = nt
            else:
                if not (
                    isinstance(body, tuple)
                    and len(body) == 2
                    and all(isinstance(x, str) for x in body)
                ):
                    raise GrammarError("rule of %r is not in normal form" % nt)
                for child in body:
                    if child not in rules:
                        raise GrammarError(
                            "undefined symbol %r in rule of %r" % (child, nt)
                        )
        topo = self._topological(rules)
        lengths: dict[str, int] = {}
        depths: dict[str, int] = {}
        for nt in topo:
            body = rules[nt]
            if isinstance(body, Term):
                lengths[nt] = 1
                depths[nt] = 1
            else:
                left, right = body
                lengths[nt] = lengths[left] + lengths[right]
                depths[nt] = 1 + max(depths[left], depths[right])
        object.__setattr__(self, "rules", rules)
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "nonterminals", tuple(rules))
        object.__setattr__(self, "terminal_alphabet", frozenset(leaf_for))
        object.__setattr__(self, "derived_lengths", lengths)
        object.__setattr__(self, "depths", depths)
        object.__setattr__(self, "leaf_for", leaf_for)
        object.__setattr__(self, "topo_order", tuple(topo))

    def __setattr__(self, name, value):
        raise AttributeError("Slp is immutable")

    @staticmethod
    def _topological(rules: Mapping[str, RuleBody]) -> list[str]:
        order: list[str] = []
        state: dict[str, int] = {}
        for root in rules:
            if state.get(root):
                continue
            stack = [root]
            state[root] = 1
            while stack:
                nt = stack[-1]
                body = rules[nt]
                pushed = False
                if not isinstance(body, Term):
                    for child in body:
                        mark = state.get(child)
                        if mark == 1 and child in stack:
                            raise GrammarError("cyclic rule graph through %r" % child)
                        if not mark:
                            state[child] = 1
                            stack.append(child)
                            pushed = True
                            break
                if not pushed:
                    state[nt] = 2
                    order.append(nt)
                    stack.pop()
        # The simple stack-membership cycle check above is quadratic in
        # pathological cases; re-verify with marks for correctness.
        done = set(order)
        if len(done) != len(order):  # pragma: no cover - defensive
            raise GrammarError("cyclic rule graph")
        return order

    @property
    def size(self) -> int:
        return len(self.rules) + sum(
            1 if isinstance(b, Term) else 2 for b in self.rules.values()
        )

    @property
    def doc_length(self) -> int:
        return self.derived_lengths[self.start]

    @property
    def depth(self) -> int:
        return self.depths[self.start]

    def is_leaf(self, nt: str) -> bool:
        return isinstance(self.rules[nt], Term)

    def leaf_symbol(self, nt: str) -> object:
        body = self.rules[nt]
        if not isinstance(body, Term):
            raise GrammarError("%r is not a leaf nonterminal" % nt)
        return body.symbol


def derived_lengths(slp: Slp) -> dict[str, int]:
    """Derived document lengths of every nonterminal (cached on the Slp)."""
    return slp.derived_lengths


def depth_of(slp: Slp) -> int:
    """Depth of the derivation tree, counting leaf nonterminals as depth 1."""
    return slp.depth


def expand_symbols(slp: Slp, limit: int = 1_000_000) -> tuple:
    """The derived symbol sequence; refuses documents longer than ``limit``."""
    if slp.doc_length > limit:
        raise ExpandLimitError(
            "document has %d symbols, limit is %d" % (slp.doc_length, limit)
        )
    out = []
    stack = [slp.start]
    rules = slp.rules
    while stack:
        body = rules[stack.pop()]
        if isinstance(body, Term):
            out.append(body.symbol)
        else:
            left, right = body
            stack.append(right)
            stack.append(left)
    return tuple(out)


def expand(slp: Slp, limit: int = 1_000_000) -> str:
    """The exact derived document as a string."""
    symbols = expand_symbols(slp, limit)
    if any(not isinstance(s, str) for s in symbols):
        raise GrammarError("document contains non-character terminals")
    return "".join(symbols)


def char_at(slp: Slp, pos: int) -> object:
    """The terminal at 1-based position ``pos``, found top-down."""
    if not 1 <= pos <= slp.doc_length:
        raise IndexError("position %d out of range 1..%d" % (pos, slp.doc_length))
    nt = slp.start
    lengths = slp.derived_lengths
    while True:
        body = slp.rules[nt]
        if isinstance(body, Term):
            return body.symbol
        left, right = body
        if pos <= lengths[left]:
            nt = left
        else:
            pos -= lengths[left]
            nt = right


def _fresh_name(base: str, taken: set) -> str:
    if base not in taken:
        taken.add(base)
        return base
    k = 1
    while "%s.%d" % (base, k) in taken:
        k += 1
    name = "%s.%d" % (base, k)
    taken.add(name)
    return name


def _leaf_base_name(symbol: object) -> str:
    if isinstance(symbol, str):
        return "T_%s" % symbol
    if is_label(symbol):
        return "T_%s" % label_text(symbol)
    return "T_%r" % (symbol,)


def insert_markers_into_slp(slp: Slp, markers: MarkerSet) -> Slp:
    """An SLP deriving the given document with marker symbols inserted.

    For each marked position one root-to-leaf path is copied with fresh
    nonterminals and the leaf replaced by a pair reading the marker-set
    symbol first; markers at position ``|doc| + 1`` hang off one extra
    root rule.  The input SLP is left untouched.
    """
    if not markers:
        return slp
    n = slp.doc_length
    by_pos = markers.by_position()
    worst = max(by_pos)
    if worst > n + 1:
        raise GrammarError(
            "marker position %d incompatible with document length %d" % (worst, n)
        )
    tail_label = by_pos.pop(n + 1, None)

    rules: dict[str, RuleBody] = dict(slp.rules)
    taken = set(rules)
    leaf_for = dict(slp.leaf_for)
    pair_for: dict[tuple, str] = {}

    def label_leaf(label) -> str:
        name = leaf_for.get(label)
        if name is None:
            name = _fresh_name(_leaf_base_name(label), taken)
            rules[name] = Term(label)
            leaf_for[label] = name
        return name

    def marked_leaf(label, leaf_nt: str) -> str:
        key = (label, leaf_nt)
        name = pair_for.get(key)
        if name is None:
            name = _fresh_name("%s'" % leaf_nt, taken)
            rules[name] = (label_leaf(label), leaf_nt)
            pair_for[key] = name
        return name

    lengths = slp.derived_lengths

    def visit(nt: str, positions: list) -> str:
        # positions: (relative position, label) pairs within D(nt)
        if not positions:
            return nt
        body = slp.rules[nt]
        if isinstance(body, Term):
            (_, label), = positions
            return marked_leaf(label, nt)
        left, right = body
        split = lengths[left]
        left_pos = [(p, lab) for p, lab in positions if p <= split]
        right_pos = [(p - split, lab) for p, lab in positions if p > split]
        new_left = visit(left, left_pos)
        new_right = visit(right, right_pos)
        name = _fresh_name(nt, taken)
        rules[name] = (new_left, new_right)
        return name

    start = visit(slp.start, sorted(by_pos.items()))
    if tail_label is not None:
        name = _fresh_name(slp.start, taken)
        rules[name] = (start, label_leaf(tail_label))
        start = name
    return Slp(rules, start)


def append_sentinel(slp: Slp, sentinel: str) -> Slp:
    """An SLP deriving the document followed by a fresh sentinel terminal."""
    if sentinel in slp.terminal_alphabet:
        raise GrammarError("sentinel %r collides with the terminal alphabet" % sentinel)
    rules: dict[str, RuleBody] = dict(slp.rules)
    taken = set(rules)
    leaf = _fresh_name(_leaf_base_name(sentinel), taken)
    rules[leaf] = Term(sentinel)
    start = _fresh_name(slp.start, taken)
    rules[start] = (slp.start, leaf)
    return Slp(rules, start)


def build_test_slp(doc: str) -> Slp:
    """A normal-form SLP for ``doc`` by balanced splitting with sharing.

    Identical substrings map to the same nonterminal, so highly
    repetitive documents collapse to logarithmically many rules; the
    depth is at most ceil(log2 |doc|) + 2.
    """
    if not doc:
        raise GrammarError("cannot build an SLP for the empty document")
    rules: dict[str, RuleBody] = {}
    taken: set = set()
    memo: dict[str, str] = {}
    counter = [0]

    def build(piece: str) -> str:
        name = memo.get(piece)
        if name is not None:
            return name
        if len(piece) == 1:
            name = _fresh_name(_leaf_base_name(piece), taken)
            rules[name] = Term(piece)
        else:
            mid = len(piece) // 2
            left = build(piece[:mid])
            right = build(piece[mid:])
            counter[0] += 1
            name = _fresh_name("N%d" % counter[0], taken)
            rules[name] = (left, right)
        memo[piece] = name
        return name

    return Slp(rules, build(doc))


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------

_SLP_TOKEN = re.compile(r"'[^']'|[^\s']+")


def parse_slp(text: str) -> RawGrammar:
    """Parse the SLP text format into a raw grammar.

    One declaration per line: ``start SYM`` once, then ``SYM -> item+``
    where an item is a nonterminal name or a quoted terminal like
    ``'a'``; ``#`` starts a comment line.  Normal form is not required.
    """
    start = None
    rules: dict[str, tuple] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = _SLP_TOKEN.findall(line)
        if tokens[0] == "start":
            if len(tokens) != 2 or tokens[1].startswith("'"):
                raise SlpFormatError("line %d: expected 'start SYM'" % lineno)
            if start is not None:
                raise SlpFormatError("line %d: duplicate start declaration" % lineno)
            start = tokens[1]
            continue
        if len(tokens) < 3 or tokens[1] != "->":
            raise SlpFormatError("line %d: expected 'SYM -> item+'" % lineno)
        name = tokens[0]
        if name.startswith("'"):
            raise SlpFormatError("line %d: terminals cannot head a rule" % lineno)
        if name in rules:
            raise SlpFormatError("line %d: duplicate rule for %r" % (lineno, name))
        body = []
        for tok in tokens[2:]:
            if tok.startswith("'"):
                body.append(Term(tok[1]))
            else:
                body.append(tok)
        rules[name] = tuple(body)
    if start is None:
        raise SlpFormatError("missing 'start' declaration")
    try:
        return RawGrammar(rules, start)
    except GrammarError:
        raise


def normalize(grammar: RawGrammar) -> Slp:
    """Normal-form SLP deriving the same document as a raw grammar.

    Terminal occurrences are replaced by their leaf nonterminals, long
    right-hand sides are binarized left-to-right with fresh names, and
    single-symbol rules are resolved as aliases (so a start rule like
    ``S -> 'a'`` turns into the leaf itself).
    """
    alias: dict[str, str] = {}
    rules: dict[str, RuleBody] = {}
    taken = set(grammar.rules)
    leaf_for: dict[object, str] = {}

    def leaf(symbol, preferred: str = None) -> str:
        name = leaf_for.get(symbol)
        if name is None:
            if preferred is not None:
                name = preferred
            else:
                name = _fresh_name(_leaf_base_name(symbol), taken)
            rules[name] = Term(symbol)
            leaf_for[symbol] = name
        return name

    def resolve(nt: str, trail: tuple = ()) -> str:
        if nt in trail:
            raise GrammarError("cyclic rule graph through %r" % nt)
        target = alias.get(nt)
        if target is None:
            body = grammar.rules[nt]
            if len(body) == 1:
                item = body[0]
                if isinstance(item, Term):
                    target = leaf(item.symbol, preferred=nt if nt not in rules else None)
                else:
                    target = resolve(item, trail + (nt,))
                alias[nt] = target
            else:
                target = nt
                alias[nt] = nt
        return target

    for nt, body in grammar.rules.items():
        if len(body) == 1 or resolve(nt) != nt:
            continue  # single-symbol rules are fully handled by resolve()
        items = [
            leaf(item.symbol) if isinstance(item, Term) else resolve(item)
            for item in body
        ]
        # Binarize scanning left to right: peel the head symbol, chain the rest.
        head_name = nt
        while len(items) > 2:
            rest = _fresh_name(nt, taken)
            rules[head_name] = (items[0], rest)
            head_name = rest
            items = items[1:]
        rules[head_name] = (items[0], items[1])
    return Slp(rules, resolve(grammar.start))


def load_slp(text: str) -> Slp:
    """Parse and normalize in one step."""
    return normalize(parse_slp(text))


def format_slp(slp: Slp) -> str:
    """Render a character-terminal SLP in the text format."""
    lines = ["start %s" % slp.start]
    for nt in slp.nonterminals:
        body = slp.rules[nt]
        if isinstance(body, Term):
            if not isinstance(body.symbol, str):
                raise GrammarError("cannot format non-character terminal %r" % (body.symbol,))
            lines.append("%s -> '%s'" % (nt, body.symbol))
        else:
            lines.append("%s -> %s %s" % (nt, body[0], body[1]))
    return "\n".join(lines) + "\n"
