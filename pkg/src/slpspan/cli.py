"""Command-line front end for spanner evaluation on compressed documents.

Exit codes: 0 for success (and "true" from decision commands), 1 for a
"false" decision, 2 for usage or input-format errors, 3 for runtime
failures such as exceeded caps.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import compute as compute_mod
from . import enumeration, membership, oracle
from . import slp as slp_mod
from . import spanner

MEMORY_CAP_ENV = "SLPSPAN_MEMORY_CAP"

EXIT_TRUE = 0
EXIT_FALSE = 1
EXIT_USAGE = 2
EXIT_RUNTIME = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slpspan",
        description="Evaluate regular document spanners directly on "
        "SLP-compressed documents.",
    )
    parser.add_argument("--seed", type=int, default=0, help="reserved; output is deterministic")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_slp(p):
        p.add_argument("--slp", required=True, metavar="FILE", help="SLP text file")

    def add_spanner(p):
        p.add_argument("--automaton", metavar="FILE", help="automaton text file")
        p.add_argument("--regex", metavar="PATTERN", help="spanner regex")
        p.add_argument("--alphabet", metavar="CHARS", help="terminals for --regex")
        p.add_argument("--vars", metavar="X,Y", default="", help="variables for --regex")

    def add_output(p):
        p.add_argument(
            "--format",
            choices=("text", "tsv", "json"),
            default="text",
            help="tuple output format",
        )

    p = sub.add_parser("stats", help="sizes of the SLP and, optionally, a spanner")
    add_slp(p)
    add_spanner(p)
    p.add_argument("--tables", action="store_true", help="dump relation tables")

    p = sub.add_parser("expand", help="decompress the document")
    add_slp(p)
    p.add_argument("--limit", type=int, default=1_000_000, help="maximum document length")

    p = sub.add_parser("compress", help="build a test SLP from a raw document")
    p.add_argument("--input", metavar="FILE", help="document file (default: stdin)")

    p = sub.add_parser("nonempty", help="does the spanner extract anything?")
    add_slp(p)
    add_spanner(p)

    p = sub.add_parser("check", help="is a given tuple extracted?")
    add_slp(p)
    add_spanner(p)
    p.add_argument("--tuple", required=True, metavar="T", help='e.g. "x=[1,2> y=_"')

    p = sub.add_parser("compute", help="materialize the whole relation")
    add_slp(p)
    add_spanner(p)
    add_output(p)

    p = sub.add_parser("enum", help="stream the relation tuple by tuple")
    add_slp(p)
    add_spanner(p)
    add_output(p)
    p.add_argument("--limit", type=int, help="stop after this many tuples")
    p.add_argument("--count-only", action="store_true", help="print only the cardinality")
    p.add_argument(
        "--allow-duplicates",
        action="store_true",
        help="run directly on a nondeterministic automaton; tuples may repeat",
    )
    p.add_argument(
        "--no-determinize",
        action="store_true",
        help="fail instead of determinizing a nondeterministic automaton",
    )
    p.add_argument(
        "--delay-stats",
        action="store_true",
        help="report producer steps between outputs on stderr",
    )

    p = sub.add_parser("oracle", help=argparse.SUPPRESS)
    add_slp(p)
    add_spanner(p)
    add_output(p)
    p.add_argument("--limit", type=int, default=10_000, help="expansion bound")

    p = sub.add_parser("bench", help="compressed versus expand-then-evaluate timings")
    add_slp(p)
    add_spanner(p)
    p.add_argument("--limit", type=int, default=1_000_000, help="expansion bound")
    return parser


def _load_slp(args) -> slp_mod.Slp:
    with open(args.slp, encoding="utf-8") as handle:
        return slp_mod.load_slp(handle.read())


def _load_spanner(args) -> spanner.SpannerAutomaton:
    if bool(args.automaton) == bool(args.regex):
        raise spanner.SpannerError("give exactly one of --automaton and --regex")
    if args.automaton:
        with open(args.automaton, encoding="utf-8") as handle:
            return spanner.parse_automaton(handle.read())
    if args.alphabet is None:
        raise spanner.SpannerError("--regex needs --alphabet")
    variables = [v for v in args.vars.replace(",", " ").split() if v]
    return spanner.compile_spanner_regex(args.regex, args.alphabet, variables)


def _tuple_lines(tuples, variables, fmt: str):
    variables = sorted(set(variables))
    for t in tuples:
        if fmt == "text":
            yield spanner.format_tuple(t, variables)
        elif fmt == "tsv":
            cells = []
            for var in variables:
                span = t.get(var)
                cells.append("_" if span is None else "%d:%d" % span)
            yield "\t".join([*cells])
        else:
            record = {
                var: (list(t.get(var)) if t.get(var) else None) for var in variables
            }
            yield json.dumps(record, sort_keys=True)


def _memory_cap():
    raw = os.environ.get(MEMORY_CAP_ENV)
    return int(raw) if raw else None


def _cmd_stats(args) -> int:
    grammar = _load_slp(args)
    print("size %d" % grammar.size)
    print("nonterminals %d" % len(grammar.nonterminals))
    print("depth %d" % grammar.depth)
    print("doc_length %d" % grammar.doc_length)
    if args.automaton or args.regex:
        automaton = _load_spanner(args)
        print("states %d" % automaton.state_count)
        print("transitions %d" % automaton.size)
        if args.tables:
            from .matrices import Reach, precompute_tables

            sentinel = spanner.fresh_sentinel(automaton.alphabet)
            tables = precompute_tables(
                slp_mod.append_sentinel(grammar, sentinel),
                spanner.make_non_tail_spanning(automaton, sentinel),
            )
            print("accepting_reachable %s" % list(tables.accepting_reachable))
            q = tables.state_count
            for nt in tables.slp.topo_order:
                cells = [
                    "%d,%d:%s" % (i, j, tables.reach(nt, i, j).name)
                    for i in range(1, q + 1)
                    for j in range(1, q + 1)
                    if tables.reach(nt, i, j) is not Reach.NONE
                ]
                print("reach %s %s" % (nt, " ".join(cells)))
    return EXIT_TRUE


def _cmd_expand(args) -> int:
    print(slp_mod.expand(_load_slp(args), args.limit))
    return EXIT_TRUE


def _cmd_compress(args) -> int:
    if args.input:
        with open(args.input, encoding="utf-8") as handle:
            doc = handle.read()
    else:
        doc = sys.stdin.read()
    if doc.endswith("\n"):
        doc = doc[:-1]
    sys.stdout.write(slp_mod.format_slp(slp_mod.build_test_slp(doc)))
    return EXIT_TRUE


def _decision(value: bool) -> int:
    print("true" if value else "false")
    return EXIT_TRUE if value else EXIT_FALSE


def _cmd_nonempty(args) -> int:
    return _decision(membership.check_nonempty(_load_slp(args), _load_spanner(args)))


def _cmd_check(args) -> int:
    t = spanner.parse_tuple(args.tuple)
    return _decision(membership.model_check(_load_slp(args), _load_spanner(args), t))


def _cmd_compute(args) -> int:
    automaton = _load_spanner(args)
    tuples = compute_mod.compute_relation(
        _load_slp(args), automaton, max_stored_sets=_memory_cap()
    )
    for line in _tuple_lines(tuples, automaton.variables, args.format):
        print(line)
    return EXIT_TRUE


def _cmd_enum(args) -> int:
    automaton = _load_spanner(args)
    if (
        args.no_determinize
        and not args.allow_duplicates
        and not automaton.deterministic
    ):
        raise spanner.SpannerError(
            "--no-determinize: the automaton is nondeterministic; "
            "pass --allow-duplicates to run it as is"
        )
    counter = enumeration.StepCounter() if args.delay_stats else None
    stream = enumeration.enumerate_relation(
        _load_slp(args),
        automaton,
        allow_duplicates=args.allow_duplicates,
        counter=counter,
    )
    count = 0
    gaps = []
    last_steps = 0
    lines = _tuple_lines(stream, automaton.variables, args.format)
    for line in lines:
        if counter is not None:
            gaps.append(counter.steps - last_steps)
            last_steps = counter.steps
        count += 1
        if not args.count_only:
            print(line, flush=True)
        if args.limit is not None and count >= args.limit:
            break
    if args.count_only:
        print(count)
    if counter is not None and gaps:
        histogram: dict[int, int] = {}
        for gap in gaps:
            histogram[gap] = histogram.get(gap, 0) + 1
        print(
            "delay-stats: outputs=%d max_gap=%d histogram=%s"
            % (count, max(gaps), sorted(histogram.items())),
            file=sys.stderr,
        )
    return EXIT_TRUE


def _cmd_oracle(args) -> int:
    automaton = _load_spanner(args)
    doc = slp_mod.expand(_load_slp(args), args.limit)
    relation = oracle.brute_force_relation(doc, automaton)
    ordered = sorted(relation, key=lambda t: spanner.tuple_to_marker_set(t).sort_key())
    for line in _tuple_lines(ordered, automaton.variables, args.format):
        print(line)
    return EXIT_TRUE


def _cmd_bench(args) -> int:
    grammar = _load_slp(args)
    automaton = _load_spanner(args)
    start = time.perf_counter()
    compressed = compute_mod.compute_relation(grammar, automaton)
    t_compressed = time.perf_counter() - start
    start = time.perf_counter()
    doc = slp_mod.expand(grammar, args.limit)
    rebuilt = slp_mod.build_test_slp(doc)
    expanded = compute_mod.compute_relation(rebuilt, automaton)
    t_expanded = time.perf_counter() - start
    assert set(compressed) == set(expanded)
    print("tuples %d" % len(compressed))
    print("compressed_seconds %.6f" % t_compressed)
    print("expand_then_evaluate_seconds %.6f" % t_expanded)
    return EXIT_TRUE


_COMMANDS = {
    "stats": _cmd_stats,
    "expand": _cmd_expand,
    "compress": _cmd_compress,
    "nonempty": _cmd_nonempty,
    "check": _cmd_check,
    "compute": _cmd_compute,
    "enum": _cmd_enum,
    "oracle": _cmd_oracle,
    "bench": _cmd_bench,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except BrokenPipeError:
        return EXIT_TRUE
    except (
        compute_mod.MemoryCapError,
        slp_mod.ExpandLimitError,
        spanner.DeterminizationLimitError,
    ) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_RUNTIME
    except (ValueError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
