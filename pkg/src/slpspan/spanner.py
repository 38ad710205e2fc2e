"""Marked words, marker sets, span-tuples, and spanner automata.

A regular spanner is represented here as an NFA whose alphabet is the
terminal alphabet extended with *marker-set symbols*: every non-empty set
of open/close markers of the span variables acts as one letter.  A
document plus a (partial) assignment of variables to spans is encoded as
a marked word interleaving marker-set symbols with the document's
characters, and the automaton accepts exactly the encodings of the
tuples it extracts.

This module is self-contained string/automaton machinery; it knows
nothing about grammar-compressed documents.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Union

log = logging.getLogger(__name__)


class SpannerError(ValueError):
    """Base class for errors raised by this module."""


class AutomatonFormatError(SpannerError):
    """Malformed automaton text."""


class RegexError(SpannerError):
    """Malformed spanner regex pattern."""


class MarkerSetError(SpannerError):
    """Marker-set operation applied to incompatible operands."""


class IncompatibleMarkersError(SpannerError):
    """Marker positions do not fit the target document."""


class DeterminizationLimitError(RuntimeError):
    """Subset construction exceeded the configured state cap."""


# ---------------------------------------------------------------------------
# Markers, marker sets, span-tuples
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Marker:
    """An open or close marker of one span variable."""

    var: str
    is_close: bool

    @property
    def key(self) -> tuple[str, bool]:
        # Fixed global marker order: variables lexicographic, open < close.
        return (self.var, self.is_close)

    @property
    def text(self) -> str:
        return ("close(%s)" if self.is_close else "open(%s)") % self.var

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return self.text


def open_marker(var: str) -> Marker:
    return Marker(var, False)


def close_marker(var: str) -> Marker:
    return Marker(var, True)


# A marker-set symbol: canonical (sorted, duplicate-free, non-empty) tuple.
Label = tuple  # tuple[Marker, ...]


def canonical_label(markers: Iterable[Marker]) -> Label:
    out = tuple(sorted(set(markers), key=lambda m: m.key))
    if not out:
        raise MarkerSetError("marker-set symbols must be non-empty")
    return out


def label_text(label: Label) -> str:
    return "{%s}" % ",".join(m.text for m in label)


def is_label(symbol: object) -> bool:
    return isinstance(symbol, tuple) and bool(symbol) and all(
        isinstance(m, Marker) for m in symbol
    )


# Sorts after every real (position, var, is_close) element; appending it to
# a serialized marker set turns "the proper prefix is the larger word" into
# plain lexicographic comparison of the padded sequences.
SEQ_END = (float("inf"),)


class MarkerSet:
    """A partial marker set: a set of (marker, position) pairs.

    Stored canonically sorted with positions major (ties broken by the
    fixed marker order), which is also the serialization underlying the
    total order used by the relation-computation machinery.
    """

    __slots__ = ("entries",)

    def __init__(self, entries: Iterable[tuple[Marker, int]] = ()):
        pairs = set()
        for marker, pos in entries:
            if pos < 1:
                raise MarkerSetError("marker positions are 1-based, got %r" % pos)
            pairs.add((marker, pos))
        object.__setattr__(
            self,
            "entries",
            tuple(sorted(pairs, key=lambda e: (e[1],) + e[0].key)),
        )

    @classmethod
    def from_label(cls, label: Label, pos: int) -> "MarkerSet":
        return cls((m, pos) for m in label)

    def __setattr__(self, name, value):  # immutability
        raise AttributeError("MarkerSet is immutable")

    def __iter__(self) -> Iterator[tuple[Marker, int]]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __bool__(self) -> bool:
        return bool(self.entries)

    def __eq__(self, other) -> bool:
        return isinstance(other, MarkerSet) and self.entries == other.entries

    def __hash__(self) -> int:
        return hash(self.entries)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return "{%s}" % ", ".join("(%s,%d)" % (m.text, p) for m, p in self.entries)

    @property
    def markers(self) -> frozenset:
        return frozenset(m for m, _ in self.entries)

    def max_position(self) -> int:
        return max((p for _, p in self.entries), default=0)

    def sort_key(self) -> tuple:
        """Key realizing the prefix-is-larger sequence order."""
        return tuple((p,) + m.key for m, p in self.entries) + (SEQ_END,)

    def shift(self, offset: int) -> "MarkerSet":
        """All positions moved right by ``offset`` (>= 0)."""
        if offset < 0:
            raise MarkerSetError("shift offset must be non-negative")
        if offset == 0 or not self.entries:
            return self
        return MarkerSet((m, p + offset) for m, p in self.entries)

    def join(self, other: "MarkerSet", split: int) -> "MarkerSet":
        """Union with ``other`` shifted right by ``split``.

        Every position of ``self`` must lie at or before ``split``; a
        marker occurring on both sides signals an invalid combination.
        """
        if self.entries and self.entries[-1][1] > split:
            raise MarkerSetError(
                "left operand has position %d beyond split %d"
                % (self.entries[-1][1], split)
            )
        clash = self.markers & other.markers
        if clash:
            raise MarkerSetError(
                "marker duplicated across join operands: %s"
                % sorted(m.text for m in clash)
            )
        if not other.entries:
            return self
        return MarkerSet(
            list(self.entries) + [(m, p + split) for m, p in other.entries]
        )

    def by_position(self) -> dict[int, Label]:
        """Positions mapped to their canonical marker-set symbols."""
        grouped: dict[int, list[Marker]] = {}
        for m, p in self.entries:
            grouped.setdefault(p, []).append(m)
        return {p: canonical_label(ms) for p, ms in grouped.items()}


EMPTY_MARKER_SET = MarkerSet()


def shift_right(markers: MarkerSet, offset: int) -> MarkerSet:
    return markers.shift(offset)


def join(left: MarkerSet, right: MarkerSet, split: int) -> MarkerSet:
    return left.join(right, split)


@dataclass(frozen=True)
class SpanTuple:
    """A partial assignment of variables to spans [start, end>.

    Unassigned variables are simply absent.  ``spans`` is kept sorted by
    variable name so tuples hash and compare structurally.
    """

    spans: tuple  # tuple[tuple[str, int, int], ...]

    def __init__(self, assignment: Union[dict, Iterable] = ()):
        items = assignment.items() if isinstance(assignment, dict) else assignment
        spans = []
        for var, span in items:
            start, end = span
            if not (1 <= start <= end):
                raise SpannerError("invalid span [%r,%r> for %s" % (start, end, var))
            spans.append((var, start, end))
        spans.sort()
        seen = {v for v, _, _ in spans}
        if len(seen) != len(spans):
            raise SpannerError("variable assigned twice")
        object.__setattr__(self, "spans", tuple(spans))

    def get(self, var: str) -> Optional[tuple[int, int]]:
        for v, i, j in self.spans:
            if v == var:
                return (i, j)
        return None

    @property
    def assigned(self) -> tuple[str, ...]:
        return tuple(v for v, _, _ in self.spans)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return "SpanTuple(%s)" % " ".join(
            "%s=[%d,%d>" % (v, i, j) for v, i, j in self.spans
        )


def tuple_to_marker_set(t: SpanTuple) -> MarkerSet:
    """The marker-set encoding of a span-tuple."""
    entries = []
    for var, start, end in t.spans:
        entries.append((open_marker(var), start))
        entries.append((close_marker(var), end))
    return MarkerSet(entries)


def marker_set_to_tuple(markers: MarkerSet, doc_length: int) -> SpanTuple:
    """Decode a complete marker set back into a span-tuple.

    The set must contain both or neither marker of every variable, with
    the open position at or before the close position, and no position
    beyond ``doc_length + 1``.
    """
    opens: dict[str, int] = {}
    closes: dict[str, int] = {}
    for marker, pos in markers:
        side = closes if marker.is_close else opens
        if marker.var in side:
            raise MarkerSetError("marker %s occurs twice" % marker.text)
        if pos > doc_length + 1:
            raise MarkerSetError(
                "position %d exceeds document length %d + 1" % (pos, doc_length)
            )
        side[marker.var] = pos
    if set(opens) != set(closes):
        raise MarkerSetError("unpaired markers for %s" % sorted(set(opens) ^ set(closes)))
    assignment = {}
    for var, start in opens.items():
        end = closes[var]
        if start > end:
            raise MarkerSetError("span of %s closes before it opens" % var)
        assignment[var] = (start, end)
    return SpanTuple(assignment)


# ---------------------------------------------------------------------------
# Marked words
# ---------------------------------------------------------------------------


class MarkedWord:
    """A document interleaved with marker-set symbols.

    Conceptually the alternating sequence A_1 b_1 ... A_n b_n A_{n+1}
    with empty sets omitted; represented as the terminal word plus the
    partial marker set placing symbols at positions 1..n+1.
    """

    __slots__ = ("word", "markers", "_labels")

    def __init__(self, word: str, markers: MarkerSet = EMPTY_MARKER_SET):
        if markers.max_position() > len(word) + 1:
            raise IncompatibleMarkersError(
                "marker at position %d, document length %d"
                % (markers.max_position(), len(word))
            )
        object.__setattr__(self, "word", word)
        object.__setattr__(self, "markers", markers)
        object.__setattr__(self, "_labels", markers.by_position())

    def __setattr__(self, name, value):
        raise AttributeError("MarkedWord is immutable")

    def __len__(self) -> int:
        """Document-length: the number of terminals."""
        return len(self.word)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MarkedWord)
            and self.word == other.word
            and self.markers == other.markers
        )

    def __hash__(self) -> int:
        return hash((self.word, self.markers))

    def label_at(self, pos: int) -> Optional[Label]:
        return self._labels.get(pos)

    def symbols(self) -> Iterator[Union[str, Label]]:
        """The alternating symbol sequence with empty sets dropped."""
        labels = self._labels
        for idx, ch in enumerate(self.word, start=1):
            lab = labels.get(idx)
            if lab is not None:
                yield lab
            yield ch
        tail = labels.get(len(self.word) + 1)
        if tail is not None:
            yield tail

    def is_non_tail_spanning(self) -> bool:
        return len(self.word) + 1 not in self._labels

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        parts = []
        for sym in self.symbols():
            parts.append(sym if isinstance(sym, str) else label_text(sym))
        return "".join(parts)


def word_of(w: MarkedWord) -> str:
    """The terminal projection of a marked word."""
    return w.word


def markers_of(w: MarkedWord) -> MarkerSet:
    """The partial marker set of a marked word."""
    return w.markers


def insert_markers(doc: str, markers: MarkerSet) -> MarkedWord:
    """Interleave a compatible marker set with a document."""
    return MarkedWord(doc, markers)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple  # tuple[tuple[str, str], ...] of (code, message)


def validate_subword_marked(
    w: MarkedWord, *, require_non_tail_spanning: bool = False
) -> ValidationReport:
    """Check the subword-marked-word conditions on a marked word.

    Verifies that no marker occurs at two positions ("disjointness"),
    that every open marker sits at or before its close ("order"), and
    that variables are marked with both or neither marker ("pairing").
    """
    violations = []
    opens: dict[str, int] = {}
    closes: dict[str, int] = {}
    seen: dict[Marker, int] = {}
    for marker, pos in w.markers:
        if marker in seen:
            violations.append(
                ("disjointness", "%s occurs at positions %d and %d"
                 % (marker.text, seen[marker], pos))
            )
            continue
        seen[marker] = pos
        (closes if marker.is_close else opens)[marker.var] = pos
    for var in set(opens) & set(closes):
        if opens[var] > closes[var]:
            violations.append(
                ("order", "span of %s closes at %d before opening at %d"
                 % (var, closes[var], opens[var]))
            )
    for var in set(opens) ^ set(closes):
        violations.append(("pairing", "variable %s has only one marker" % var))
    if require_non_tail_spanning and not w.is_non_tail_spanning():
        violations.append(("tail", "marker-set symbol after the last terminal"))
    return ValidationReport(not violations, tuple(violations))


# ---------------------------------------------------------------------------
# Spanner automata
# ---------------------------------------------------------------------------


class _Epsilon:
    __slots__ = ()

    def __repr__(self) -> str:
        return "eps"


EPSILON = _Epsilon()

TransitionLabel = Union[str, Label, _Epsilon]


def _label_sort_key(label: TransitionLabel):
    if label is EPSILON:
        return (2,)
    if isinstance(label, str):
        return (0, label)
    return (1, tuple(m.key for m in label))


class SpannerAutomaton:
    """An NFA over terminals and marker-set symbols; states 1..q, start 1.

    Immutable after construction.  Labels are canonicalized (marker sets
    sorted and duplicate-free) so label equality is structural; the
    ``deterministic`` flag is computed, not declared.
    """

    __slots__ = (
        "state_count",
        "accepting",
        "arcs",
        "alphabet",
        "variables",
        "deterministic",
        "_succ",
        "_closure_masks",
        "_delta_masks",
        "_det_step",
    )

    def __init__(
        self,
        state_count: int,
        accepting: Iterable[int],
        arcs: Iterable[tuple[int, TransitionLabel, int]],
        alphabet: Iterable[str],
        variables: Iterable[str] = (),
    ):
        alphabet = tuple(dict.fromkeys(alphabet))
        variables = tuple(dict.fromkeys(variables))
        accepting = frozenset(accepting)
        if state_count < 1:
            raise SpannerError("automaton needs at least the start state 1")
        varset = set(variables)
        seen = set()
        for p, label, q in arcs:
            if not (1 <= p <= state_count and 1 <= q <= state_count):
                raise SpannerError("transition %r uses a state out of range" % ((p, label, q),))
            if label is EPSILON:
                pass
            elif isinstance(label, str):
                if label not in alphabet:
                    raise SpannerError("transition on undeclared terminal %r" % label)
            else:
                label = canonical_label(label)
                for m in label:
                    if m.var not in varset:
                        raise SpannerError("transition on undeclared variable %r" % m.var)
            seen.add((p, label, q))
        for f in accepting:
            if not 1 <= f <= state_count:
                raise SpannerError("accepting state %d out of range" % f)
        arcs = tuple(sorted(seen, key=lambda a: (a[0], _label_sort_key(a[1]), a[2])))
        succ: dict[tuple[int, object], list[int]] = {}
        for p, label, q in arcs:
            succ.setdefault((p, label), []).append(q)
        deterministic = all(label is not EPSILON for _, label, _ in arcs) and all(
            len(v) == 1 for v in succ.values()
        )
        object.__setattr__(self, "state_count", state_count)
        object.__setattr__(self, "accepting", accepting)
        object.__setattr__(self, "arcs", arcs)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "deterministic", deterministic)
        object.__setattr__(self, "_succ", {k: tuple(v) for k, v in succ.items()})
        object.__setattr__(self, "_closure_masks", None)
        object.__setattr__(self, "_delta_masks", {})
        object.__setattr__(
            self,
            "_det_step",
            {k: v[0] for k, v in succ.items()} if deterministic else None,
        )

    def __setattr__(self, name, value):
        raise AttributeError("SpannerAutomaton is immutable")

    @property
    def size(self) -> int:
        """|M|: the number of transitions."""
        return len(self.arcs)

    def successors(self, state: int, label: TransitionLabel) -> tuple[int, ...]:
        return self._succ.get((state, label), ())

    @property
    def has_epsilon(self) -> bool:
        return any(label is EPSILON for _, label, _ in self.arcs)

    def labels(self) -> list:
        """Distinct non-epsilon transition labels, canonically ordered."""
        out = {label for _, label, _ in self.arcs if label is not EPSILON}
        return sorted(out, key=_label_sort_key)

    # -- bitmask simulation helpers (state s <-> bit 1 << s) ---------------

    def _closures(self) -> list[int]:
        masks = self._closure_masks
        if masks is None:
            eps_adj: list[list[int]] = [[] for _ in range(self.state_count + 1)]
            for p, label, q in self.arcs:
                if label is EPSILON:
                    eps_adj[p].append(q)
            masks = [0] * (self.state_count + 1)
            for s in range(1, self.state_count + 1):
                seen = 1 << s
                stack = [s]
                while stack:
                    u = stack.pop()
                    for v in eps_adj[u]:
                        if not seen >> v & 1:
                            seen |= 1 << v
                            stack.append(v)
                masks[s] = seen
            object.__setattr__(self, "_closure_masks", masks)
        return masks

    def _delta(self, label: TransitionLabel) -> list[int]:
        rows = self._delta_masks.get(label)
        if rows is None:
            rows = [0] * (self.state_count + 1)
            for p, lab, q in self.arcs:
                if lab == label and lab is not EPSILON:
                    rows[p] |= 1 << q
            self._delta_masks[label] = rows
        return rows

    def _close_mask(self, mask: int) -> int:
        closures = self._closures()
        out = 0
        while mask:
            low = mask & -mask
            out |= closures[low.bit_length() - 1]
            mask ^= low
        return out

    def accept_mask(self) -> int:
        mask = 0
        for f in self.accepting:
            mask |= 1 << f
        return mask


def accepts(automaton: SpannerAutomaton, w: MarkedWord) -> bool:
    """Standard NFA acceptance with marker-set symbols read as letters."""
    if automaton.deterministic:
        step = automaton._det_step
        state = 1
        for sym in w.symbols():
            state = step.get((state, sym))
            if state is None:
                return False
        return state in automaton.accepting
    current = automaton._close_mask(1 << 1)
    acc = automaton.accept_mask()
    for sym in w.symbols():
        rows = automaton._delta(sym)
        nxt = 0
        m = current
        while m:
            low = m & -m
            nxt |= rows[low.bit_length() - 1]
            m ^= low
        if not nxt:
            return False
        current = automaton._close_mask(nxt)
    return bool(current & acc)


def eliminate_epsilon(automaton: SpannerAutomaton) -> SpannerAutomaton:
    """Language-equivalent automaton without epsilon transitions.

    Keeps the state numbering; folds the closure into each labelled arc
    and extends acceptance to states whose closure meets an accepting
    state.
    """
    if not automaton.has_epsilon:
        return automaton
    closures = automaton._closures()
    arcs = []
    for label in automaton.labels():
        rows = automaton._delta(label)
        for p in range(1, automaton.state_count + 1):
            reach = automaton._close_mask(closures[p])
            targets = 0
            m = reach
            while m:
                low = m & -m
                targets |= rows[low.bit_length() - 1]
                m ^= low
            targets = automaton._close_mask(targets)
            m = targets
            while m:
                low = m & -m
                arcs.append((p, label, low.bit_length() - 1))
                m ^= low
    accepting = [
        s
        for s in range(1, automaton.state_count + 1)
        if closures[s] & automaton.accept_mask()
    ]
    return SpannerAutomaton(
        automaton.state_count, accepting, arcs, automaton.alphabet, automaton.variables
    )


def make_non_tail_spanning(
    automaton: SpannerAutomaton, sentinel: str
) -> SpannerAutomaton:
    """L(M') = L(M) followed by a fresh end-of-document sentinel.

    A new accepting state is reached by the sentinel from every old
    accepting state; old accepting states are demoted, so no accepted
    word can end in a marker-set symbol.
    """
    if sentinel in automaton.alphabet:
        raise SpannerError("sentinel %r collides with the alphabet" % sentinel)
    new = automaton.state_count + 1
    arcs = list(automaton.arcs)
    arcs.extend((f, sentinel, new) for f in automaton.accepting)
    return SpannerAutomaton(
        new, (new,), arcs, automaton.alphabet + (sentinel,), automaton.variables
    )


DEFAULT_SUBSET_CAP = 1 << 20


def determinize(
    automaton: SpannerAutomaton, *, subset_cap: int = DEFAULT_SUBSET_CAP
) -> SpannerAutomaton:
    """Subset construction over the effective alphabet.

    Epsilon transitions are eliminated first; the result is language
    equivalent over the terminals and marker-set labels occurring in the
    automaton, renumbered so the start subset is state 1.
    """
    if automaton.deterministic:
        return automaton
    nfa = eliminate_epsilon(automaton)
    labels = nfa.labels()
    deltas = {label: nfa._delta(label) for label in labels}
    start = 1 << 1
    index = {start: 1}
    order = [start]
    arcs = []
    frontier = [start]
    while frontier:
        mask = frontier.pop()
        for label in labels:
            rows = deltas[label]
            nxt = 0
            m = mask
            while m:
                low = m & -m
                nxt |= rows[low.bit_length() - 1]
                m ^= low
            if not nxt:
                continue
            tgt = index.get(nxt)
            if tgt is None:
                if len(index) >= subset_cap:
                    raise DeterminizationLimitError(
                        "subset construction exceeded %d states" % subset_cap
                    )
                tgt = len(index) + 1
                index[nxt] = tgt
                order.append(nxt)
                frontier.append(nxt)
            arcs.append((index[mask], label, tgt))
    acc_mask = nfa.accept_mask()
    accepting = [index[m] for m in order if m & acc_mask]
    return SpannerAutomaton(
        len(index), accepting, arcs, nfa.alphabet, nfa.variables
    )


def fresh_sentinel(alphabet: Iterable[str]) -> str:
    """A one-character terminal not present in ``alphabet``."""
    taken = set(alphabet)
    for ch in "#$%&@!~^":
        if ch not in taken:
            return ch
    code = 0x21
    while chr(code) in taken:
        code += 1
    return chr(code)


# ---------------------------------------------------------------------------
# Text formats
# ---------------------------------------------------------------------------

_LABEL_ITEM = re.compile(r"(open|close)\((\w+)\)$")


def _parse_label(text: str, variables: set[str], lineno: int) -> Label:
    body = text[1:-1].strip()
    if not body:
        raise AutomatonFormatError("line %d: empty marker set" % lineno)
    markers = []
    for item in body.split(","):
        m = _LABEL_ITEM.match(item.strip())
        if not m:
            raise AutomatonFormatError(
                "line %d: bad marker %r (expected open(x)/close(x))" % (lineno, item)
            )
        kind, var = m.groups()
        if var not in variables:
            raise AutomatonFormatError("line %d: unknown variable %r" % (lineno, var))
        markers.append(Marker(var, kind == "close"))
    return canonical_label(markers)


def parse_automaton(text: str) -> SpannerAutomaton:
    """Parse the automaton text format.

    Directives: ``states q``, ``start 1`` (the start state must be 1),
    ``accept i j ...``, ``alphabet a b c``, ``vars x y`` and one
    ``trans p label q`` line per transition, where a label is a single
    terminal, ``eps``, or ``{open(x),close(y)}``.
    """
    state_count = None
    accepting: list[int] = []
    alphabet: list[str] = []
    variables: list[str] = []
    trans: list[tuple[int, str, int, int]] = []
    saw_start = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        head = fields[0]
        try:
            if head == "states":
                state_count = int(fields[1])
            elif head == "start":
                if fields[1] != "1":
                    raise AutomatonFormatError(
                        "line %d: start state must be 1" % lineno
                    )
                saw_start = True
            elif head == "accept":
                accepting.extend(int(f) for f in fields[1:])
            elif head == "alphabet":
                alphabet.extend(fields[1:])
            elif head == "vars":
                variables.extend(fields[1:])
            elif head == "trans":
                if len(fields) != 4:
                    raise AutomatonFormatError(
                        "line %d: expected 'trans p label q'" % lineno
                    )
                trans.append((int(fields[1]), fields[2], int(fields[3]), lineno))
            else:
                raise AutomatonFormatError(
                    "line %d: unknown directive %r" % (lineno, head)
                )
        except (IndexError, ValueError) as exc:
            if isinstance(exc, AutomatonFormatError):
                raise
            raise AutomatonFormatError("line %d: %s" % (lineno, raw.strip())) from exc
    if state_count is None:
        raise AutomatonFormatError("missing 'states' directive")
    if not saw_start:
        raise AutomatonFormatError("missing 'start 1' directive")
    for ch in alphabet:
        if len(ch) != 1:
            raise AutomatonFormatError("alphabet symbols must be single characters")
    varset = set(variables)
    arcs = []
    for p, label_text_, q, lineno in trans:
        if label_text_ == "eps":
            label: TransitionLabel = EPSILON
        elif label_text_.startswith("{"):
            label = _parse_label(label_text_, varset, lineno)
        elif label_text_ in alphabet:
            label = label_text_
        else:
            raise AutomatonFormatError(
                "line %d: label %r is not in the alphabet" % (lineno, label_text_)
            )
        if not (1 <= p <= state_count and 1 <= q <= state_count):
            raise AutomatonFormatError("line %d: state index out of range" % lineno)
        arcs.append((p, label, q))
    return SpannerAutomaton(state_count, accepting, arcs, alphabet, variables)


def format_automaton(automaton: SpannerAutomaton) -> str:
    lines = [
        "states %d" % automaton.state_count,
        "start 1",
        "accept %s" % " ".join(str(f) for f in sorted(automaton.accepting)),
        "alphabet %s" % " ".join(automaton.alphabet),
    ]
    if automaton.variables:
        lines.append("vars %s" % " ".join(automaton.variables))
    for p, label, q in automaton.arcs:
        if label is EPSILON:
            text = "eps"
        elif isinstance(label, str):
            text = label
        else:
            text = label_text(label)
        lines.append("trans %d %s %d" % (p, text, q))
    return "\n".join(lines) + "\n"


_TUPLE_ITEM = re.compile(r"(\w+)=(?:_|\[(\d+),(\d+)>)$")


def parse_tuple(text: str) -> SpanTuple:
    """Parse the tuple text format, e.g. ``x=[1,2> y=_``."""
    assignment = {}
    for item in text.split():
        m = _TUPLE_ITEM.match(item)
        if not m:
            raise SpannerError("bad tuple item %r" % item)
        var, start, end = m.groups()
        if start is not None:
            assignment[var] = (int(start), int(end))
    return SpanTuple(assignment)


def format_tuple(t: SpanTuple, variables: Iterable[str]) -> str:
    parts = []
    for var in sorted(set(variables)):
        span = t.get(var)
        parts.append("%s=_" % var if span is None else "%s=[%d,%d>" % (var, *span))
    return " ".join(parts)


# ---------------------------------------------------------------------------
# Spanner regex compiler
# ---------------------------------------------------------------------------

_IDENT = re.compile(r"[A-Za-z_]\w*")


def _tokenize_pattern(pattern: str) -> list[tuple[str, str]]:
    tokens = []
    i = 0
    n = len(pattern)
    while i < n:
        ch = pattern[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "()|*+?.":
            tokens.append((ch, ch))
            i += 1
            continue
        if ch == "}":
            m = _IDENT.match(pattern, i + 1)
            if not m:
                raise RegexError("'}' must be followed by its variable name")
            tokens.append(("varclose", m.group()))
            i = m.end()
            continue
        if ch == "{":
            raise RegexError("'{' without a preceding variable name")
        m = _IDENT.match(pattern, i)
        if m and m.end() < n and pattern[m.end()] == "{":
            tokens.append(("varopen", m.group()))
            i = m.end() + 1
            continue
        tokens.append(("lit", ch))
        i += 1
    return tokens


class _PatternParser:
    """Recursive-descent parser for the spanner regex dialect."""

    def __init__(self, tokens: list[tuple[str, str]], alphabet: tuple[str, ...]):
        self.tokens = tokens
        self.pos = 0
        self.alphabet = alphabet

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def parse(self):
        node = self.alternation()
        if self.pos != len(self.tokens):
            raise RegexError("unexpected %r" % (self.peek()[1],))
        return node

    def alternation(self):
        branches = [self.concatenation()]
        while self.peek()[0] == "|":
            self.take()
            branches.append(self.concatenation())
        return branches[0] if len(branches) == 1 else ("alt", branches)

    def concatenation(self):
        parts = []
        while True:
            kind, _ = self.peek()
            if kind in (None, "|", ")", "varclose"):
                break
            parts.append(self.repetition())
        if not parts:
            return ("eps",)
        return parts[0] if len(parts) == 1 else ("cat", parts)

    def repetition(self):
        node = self.atom()
        while True:
            kind, _ = self.peek()
            if kind == "*":
                self.take()
                node = ("star", node)
            elif kind == "+":
                self.take()
                node = ("plus", node)
            elif kind == "?":
                self.take()
                node = ("opt", node)
            else:
                return node

    def atom(self):
        kind, value = self.take()
        if kind == "lit":
            if value not in self.alphabet:
                raise RegexError("terminal %r is not in the alphabet" % value)
            return ("lit", value)
        if kind == ".":
            return ("any",)
        if kind == "(":
            node = self.alternation()
            if self.take()[0] != ")":
                raise RegexError("unbalanced parenthesis")
            return node
        if kind == "varopen":
            inner = self.alternation()
            closing, name = self.take()
            if closing != "varclose":
                raise RegexError("variable bracket of %r is not closed" % value)
            if name != value:
                raise RegexError(
                    "variable bracket opened as %r but closed as %r" % (value, name)
                )
            return ("var", value, inner)
        raise RegexError("unexpected %r" % (value,))


def _check_variable_usage(node, variables: set[str]) -> set[str]:
    """Used variables of a pattern node; rejects reuse and repetition."""
    kind = node[0]
    if kind in ("lit", "any", "eps"):
        return set()
    if kind == "cat":
        used: set[str] = set()
        for part in node[1]:
            part_used = _check_variable_usage(part, variables)
            if used & part_used:
                raise RegexError(
                    "variable %s used twice in one alternative"
                    % sorted(used & part_used)[0]
                )
            used |= part_used
        return used
    if kind == "alt":
        used = set()
        for branch in node[1]:
            used |= _check_variable_usage(branch, variables)
        return used
    if kind in ("star", "plus"):
        inner = _check_variable_usage(node[1], variables)
        if inner:
            raise RegexError(
                "variable %s may repeat under %r" % (sorted(inner)[0], kind)
            )
        return set()
    if kind == "opt":
        return _check_variable_usage(node[1], variables)
    if kind == "var":
        _, name, inner = node
        if name not in variables:
            raise RegexError("variable %r is not declared" % name)
        inner_used = _check_variable_usage(inner, variables)
        if name in inner_used:
            raise RegexError("variable %s used twice in one alternative" % name)
        return inner_used | {name}
    raise AssertionError(node)


class _NfaBuilder:
    def __init__(self, alphabet: tuple[str, ...]):
        self.alphabet = alphabet
        self.count = 0
        self.arcs: list[tuple[int, TransitionLabel, int]] = []

    def state(self) -> int:
        self.count += 1
        return self.count

    def add(self, p: int, label: TransitionLabel, q: int):
        self.arcs.append((p, label, q))

    def build(self, node) -> tuple[int, int]:
        kind = node[0]
        if kind == "eps":
            s = self.state()
            return s, s
        if kind == "lit":
            s, t = self.state(), self.state()
            self.add(s, node[1], t)
            return s, t
        if kind == "any":
            s, t = self.state(), self.state()
            for ch in self.alphabet:
                self.add(s, ch, t)
            return s, t
        if kind == "cat":
            first, last = None, None
            for part in node[1]:
                s, t = self.build(part)
                if first is None:
                    first = s
                else:
                    self.add(last, EPSILON, s)
                last = t
            return first, last
        if kind == "alt":
            s, t = self.state(), self.state()
            for branch in node[1]:
                bs, bt = self.build(branch)
                self.add(s, EPSILON, bs)
                self.add(bt, EPSILON, t)
            return s, t
        if kind == "star":
            s, t = self.state(), self.state()
            bs, bt = self.build(node[1])
            self.add(s, EPSILON, bs)
            self.add(s, EPSILON, t)
            self.add(bt, EPSILON, bs)
            self.add(bt, EPSILON, t)
            return s, t
        if kind == "plus":
            bs, bt = self.build(node[1])
            t = self.state()
            self.add(bt, EPSILON, t)
            self.add(t, EPSILON, bs)
            return bs, t
        if kind == "opt":
            s, t = self.state(), self.state()
            bs, bt = self.build(node[1])
            self.add(s, EPSILON, bs)
            self.add(bt, EPSILON, t)
            self.add(s, EPSILON, t)
            return s, t
        if kind == "var":
            _, name, inner = node
            s, t = self.state(), self.state()
            bs, bt = self.build(inner)
            self.add(s, canonical_label([open_marker(name)]), bs)
            self.add(bt, canonical_label([close_marker(name)]), t)
            return s, t
        raise AssertionError(node)


def _saturate_marker_paths(
    state_count: int, arcs: list[tuple[int, TransitionLabel, int]]
) -> list[tuple[int, TransitionLabel, int]]:
    """Add union-labelled shortcuts for chains of adjacent marker symbols.

    For every path that reads two or more marker-set symbols with only
    epsilon moves in between, and whose sets are pairwise disjoint, a
    direct transition labelled with the union is added (to fixpoint).
    The original transitions are kept.
    """
    eps_adj: list[list[int]] = [[] for _ in range(state_count + 1)]
    marker_adj: list[list[tuple[frozenset, int]]] = [[] for _ in range(state_count + 1)]
    for p, label, q in arcs:
        if label is EPSILON:
            eps_adj[p].append(q)
        elif not isinstance(label, str):
            marker_adj[p].append((frozenset(label), q))

    closures: list[tuple[int, ...]] = [()] * (state_count + 1)
    for s in range(1, state_count + 1):
        seen = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for v in eps_adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        closures[s] = tuple(seen)

    new_arcs = set()
    for start in range(1, state_count + 1):
        frontier: list[tuple[frozenset, int, int]] = []
        visited: set[tuple[frozenset, int]] = set()
        for s in closures[start]:
            for markers, t in marker_adj[s]:
                item = (markers, t)
                if item not in visited:
                    visited.add(item)
                    frontier.append((markers, t, 1))
        while frontier:
            union, state, hops = frontier.pop()
            for s in closures[state]:
                for markers, t in marker_adj[s]:
                    if markers & union:
                        continue
                    bigger = union | markers
                    item = (bigger, t)
                    if item in visited:
                        continue
                    visited.add(item)
                    new_arcs.add((start, canonical_label(bigger), t))
                    frontier.append((bigger, t, hops + 1))
    return arcs + sorted(
        new_arcs, key=lambda a: (a[0], _label_sort_key(a[1]), a[2])
    )


def compile_spanner_regex(
    pattern: str, alphabet: Iterable[str], variables: Iterable[str] = ()
) -> SpannerAutomaton:
    """Compile a spanner regex into an NFA over terminals and marker sets.

    Supports ``| * + ?``, grouping, ``.`` for any terminal, and variable
    brackets ``x{ ... }x`` (each variable at most once per alternative).
    Thompson construction with singleton marker transitions, followed by
    marker-set saturation so that adjacent markers can also be read as a
    single set symbol, the way marked words present them.
    """
    alphabet = tuple(dict.fromkeys(alphabet))
    variables = tuple(dict.fromkeys(variables))
    tokens = _tokenize_pattern(pattern)
    if not tokens:
        raise RegexError("empty pattern")
    ast = _PatternParser(tokens, alphabet).parse()
    _check_variable_usage(ast, set(variables))
    builder = _NfaBuilder(alphabet)
    start, accept = builder.build(ast)
    arcs = _saturate_marker_paths(builder.count, builder.arcs)
    if start != 1:  # swap so the start state is 1, per convention
        def ren(s: int) -> int:
            return 1 if s == start else (start if s == 1 else s)

        arcs = [(ren(p), label, ren(q)) for p, label, q in arcs]
        accept = ren(accept)
    return SpannerAutomaton(builder.count, (accept,), arcs, alphabet, variables)
