"""Evaluation of regular document spanners over SLP-compressed documents.

Non-emptiness, model checking, full relation computation, and
bounded-delay enumeration, all without decompressing the document.
"""

from .compute import (
    ComputeStats,
    MemoryCapError,
    compare_marker_sets,
    compute_relation,
    merge_product,
    merge_union,
)
from .enumeration import (
    MTree,
    StepCounter,
    enum_tree_yield,
    enum_trees,
    enumerate_relation,
)
from .matrices import Reach, RelationTables, precompute_tables
from .membership import check_nonempty, model_check, slp_membership
from .oracle import CandidateSpace, brute_force_relation
from .slp import (
    ExpandLimitError,
    GrammarError,
    RawGrammar,
    Slp,
    SlpFormatError,
    Term,
    append_sentinel,
    build_test_slp,
    char_at,
    depth_of,
    derived_lengths,
    expand,
    expand_symbols,
    format_slp,
    insert_markers_into_slp,
    load_slp,
    normalize,
    parse_slp,
)
from .spanner import (
    EPSILON,
    MarkedWord,
    Marker,
    MarkerSet,
    SpanTuple,
    SpannerAutomaton,
    SpannerError,
    ValidationReport,
    accepts,
    close_marker,
    compile_spanner_regex,
    determinize,
    eliminate_epsilon,
    format_automaton,
    format_tuple,
    insert_markers,
    join,
    make_non_tail_spanning,
    marker_set_to_tuple,
    markers_of,
    open_marker,
    parse_automaton,
    parse_tuple,
    shift_right,
    tuple_to_marker_set,
    validate_subword_marked,
    word_of,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
