"""Command-line front end.

Subcommands: `check` (word bisimilarity), `typeq` (session type equivalence),
`norms`, `congruence`, `oracle`, `fuzz`.  Exit codes: 0 positive verdict,
1 negative verdict, 2 usage or input error, 3 inconclusive (oracles only).
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import session
from .congruence import (
    BudgetExceeded,
    decide_coinductive,
    decide_inductive,
    parse_basis,
)
from .engine import decide_words
from .grammar import (
    ContractViolation,
    GrammarError,
    eliminate_dead,
    format_word,
    parse_grammar,
    parse_word,
)
from .norms import INF, compute_norms, valuation
from .oracle import approximant_distinguish, trace_closure_check
from .fuzz import FuzzConfig, run_fuzz, summary_text

EXIT_POSITIVE = 0
EXIT_NEGATIVE = 1
EXIT_ERROR = 2
EXIT_INCONCLUSIVE = 3


def _load_grammar(path):
    with open(path, encoding="utf-8") as handle:
        return parse_grammar(handle.read())


def _words(g, texts):
    return [g.check_word(parse_word(t)) for t in texts]


def _cmd_check(args) -> int:
    g = _load_grammar(args.grammar)
    left, right = _words(g, [args.left, args.right])
    started = time.perf_counter()
    decision, *_ = decide_words(g, left, right)
    elapsed_ms = 1000 * (time.perf_counter() - started)
    verdict = "bisimilar" if decision.bisimilar else "not-bisimilar"
    if args.trace == "json":
        doc = decision.trace_json(command="check")
        doc["stats"]["wall_time_ms"] = round(elapsed_ms, 3)
        print(json.dumps(doc, sort_keys=True))
    else:
        print(verdict)
    if args.stats:
        s = decision.stats
        print(
            f"iterations={s.iterations} basis_changes={s.basis_changes} "
            f"peak_seminorm={s.peak_seminorm} wall_time_ms={elapsed_ms:.3f}",
            file=sys.stderr,
        )
    return EXIT_POSITIVE if decision.bisimilar else EXIT_NEGATIVE


def _cmd_typeq(args) -> int:
    if args.expr:
        if len(args.expr) != 2 or args.files:
            raise GrammarError("typeq needs exactly two types (two files or two -e)")
        texts = args.expr
    else:
        if len(args.files) != 2:
            raise GrammarError("typeq needs exactly two types (two files or two -e)")
        texts = []
        for path in args.files:
            with open(path, encoding="utf-8") as handle:
                texts.append(handle.read())
    types = [session.parse_type(t) for t in texts]
    if args.explain:
        for label, t in zip("AB", types):
            print(
                f"type {label}: terminated={session.is_terminated(t)} "
                f"contractive={session.is_contractive(t)} well_formed={session.is_type(t)}",
                file=sys.stderr,
            )
    grammar, words = session.to_grammar(types)
    if args.explain:
        from .grammar import format_grammar

        sys.stderr.write(format_grammar(grammar))
        for label, w in zip("AB", words):
            print(f"word {label}: {format_word(w)}", file=sys.stderr)
    decision, *_ = decide_words(grammar, words[0], words[1])
    print("equivalent" if decision.bisimilar else "not-equivalent")
    return EXIT_POSITIVE if decision.bisimilar else EXIT_NEGATIVE


def _cmd_norms(args) -> int:
    g = _load_grammar(args.grammar)
    table = compute_norms(g)
    for x in g.nonterminals:
        n = table.norm[x]
        if n is INF:
            print(f"{x} norm=inf")
        else:
            a, rhs = table.canonical_step[x]
            print(f"{x} norm={n} step={a} -> {format_word(rhs)}")
    print(f"valuation {valuation(table, g)}")
    return EXIT_POSITIVE


def _cmd_congruence(args) -> int:
    g = _load_grammar(args.grammar)
    with open(args.basis, encoding="utf-8") as handle:
        basis = parse_basis(handle.read(), g)
    if args.reflexive:
        for x in g.nonterminals:
            basis.add(((x,), (x,)))
    table = compute_norms(g)
    left, right = _words(g, [args.left, args.right])
    decider = decide_coinductive if args.mode == "coinductive" else decide_inductive
    verdict = decider(basis, table, left, right)
    if args.trace == "json":
        doc = {"schema": 1, "command": "congruence", "mode": args.mode}
        doc.update(verdict.to_json())
        print(json.dumps(doc, sort_keys=True))
    else:
        print("congruent" if verdict.congruent else "not-congruent")
    return EXIT_POSITIVE if verdict.congruent else EXIT_NEGATIVE


def _cmd_oracle(args) -> int:
    g = _load_grammar(args.grammar)
    left, right = _words(g, [args.left, args.right])
    if args.which == "approximant":
        found = approximant_distinguish(g, left, right, n_max=args.max_depth)
        if found is None:
            doc = {"outcome": "inconclusive", "max_depth": args.max_depth}
            print(json.dumps(doc, sort_keys=True) if args.json else
                  f"no difference up to depth {args.max_depth}")
            return EXIT_INCONCLUSIVE
        depth, witness = found
        doc = {"outcome": "no", "depth": depth,
               "witness": list(witness) if witness else None}
        print(json.dumps(doc, sort_keys=True) if args.json else
              f"distinguished at depth {depth}" +
              (f", witness {' '.join(witness)}" if witness else ""))
        return EXIT_NEGATIVE
    g2, [(left, right)] = eliminate_dead(g, [(left, right)])
    verdict = trace_closure_check(g2, left, right, len_cap=args.len_cap)
    if args.json:
        print(json.dumps(verdict.to_json(), sort_keys=True))
    elif verdict.outcome == "yes":
        print("bisimilar (finite closure)")
    elif verdict.outcome == "no":
        print(f"not bisimilar, witness {' '.join(verdict.witness) if verdict.witness else '-'}")
    else:
        print(f"inconclusive (length cap {args.len_cap})")
    return {"yes": EXIT_POSITIVE, "no": EXIT_NEGATIVE, "inconclusive": EXIT_INCONCLUSIVE}[
        verdict.outcome
    ]


def _cmd_fuzz(args) -> int:
    cfg = FuzzConfig(
        seed=args.seed,
        count=args.count,
        max_nonterminals=args.max_nonterminals,
        max_terminals=args.max_terminals,
        max_rhs_len=args.max_rhs_len,
        max_word_len=args.max_word_len,
        inject_dead=args.inject_dead,
        approx_cap=args.max_depth,
        len_cap=args.len_cap,
    )
    summary = run_fuzz(cfg)
    print(summary_text(summary))
    clean = not summary["discrepancies"] and not summary["guard_violations"]
    return EXIT_POSITIVE if clean else EXIT_NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="grambisim",
        description="Bisimilarity of simple grammars and context-free session type equivalence",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="decide bisimilarity of two words")
    check.add_argument("grammar")
    check.add_argument("left")
    check.add_argument("right")
    check.add_argument("--trace", choices=["json"])
    check.add_argument("--stats", action="store_true")
    check.set_defaults(func=_cmd_check)

    typeq = sub.add_parser("typeq", help="decide session type equivalence")
    typeq.add_argument("files", nargs="*")
    typeq.add_argument("-e", "--expr", action="append", default=[])
    typeq.add_argument("--explain", action="store_true")
    typeq.set_defaults(func=_cmd_typeq)

    norms = sub.add_parser("norms", help="print norms, canonical steps, valuation")
    norms.add_argument("grammar")
    norms.set_defaults(func=_cmd_norms)

    cong = sub.add_parser("congruence", help="decide congruence for a basis")
    cong.add_argument("grammar")
    cong.add_argument("basis")
    cong.add_argument("left")
    cong.add_argument("right")
    cong.add_argument("--mode", choices=["coinductive", "inductive"], default="coinductive")
    cong.add_argument("--reflexive", action="store_true", help="add (X, X) pairs before deciding")
    cong.add_argument("--trace", choices=["json"])
    cong.set_defaults(func=_cmd_congruence)

    oracle = sub.add_parser("oracle", help="run an independent oracle")
    oracle.add_argument("which", choices=["approximant", "closure"])
    oracle.add_argument("grammar")
    oracle.add_argument("left")
    oracle.add_argument("right")
    oracle.add_argument("--max-depth", type=int, default=64)
    oracle.add_argument("--len-cap", type=int, default=64)
    oracle.add_argument("--json", action="store_true")
    oracle.set_defaults(func=_cmd_oracle)

    fuzz = sub.add_parser("fuzz", help="random cross-checking against the oracles")
    fuzz.add_argument("--seed", type=int, default=1)
    fuzz.add_argument("--count", type=int, default=100)
    fuzz.add_argument("--max-nonterminals", type=int, default=6)
    fuzz.add_argument("--max-terminals", type=int, default=3)
    fuzz.add_argument("--max-rhs-len", type=int, default=2)
    fuzz.add_argument("--max-word-len", type=int, default=3)
    fuzz.add_argument("--inject-dead", action="store_true")
    fuzz.add_argument("--max-depth", type=int, default=64)
    fuzz.add_argument("--len-cap", type=int, default=64)
    fuzz.set_defaults(func=_cmd_fuzz)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_POSITIVE
    try:
        return args.func(args)
    except (GrammarError, ContractViolation, session.TypeSyntaxError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
