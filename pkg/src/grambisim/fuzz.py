"""Seeded random-instance harness cross-checking the decider against the oracles.

Every instance runs the full pipeline, then every answer is certified: a yes
must yield a self-bisimulation basis whose coinductive congruence contains
the input pair and must never be distinguished by an approximant; a no must
be distinguished within the approximant cap and never closed by the trace
oracle.  Complexity budgets and the congruence visited-pair guard are checked
along the way.  All randomness flows from one seed so summaries replay
byte-for-byte.
"""

from __future__ import annotations

import json
import random
import string
from dataclasses import asdict, dataclass

from .congruence import decide_coinductive, check_self_bisimulation
from .engine import decide
from .grammar import Grammar, eliminate_dead, format_grammar, format_word
from .norms import compute_norms, prune, valuation
from .oracle import approximant_distinguish, trace_closure_check


@dataclass(frozen=True)
class FuzzConfig:
    seed: int = 1
    count: int = 100
    max_nonterminals: int = 6
    max_terminals: int = 3
    max_rhs_len: int = 2
    max_word_len: int = 3
    inject_dead: bool = False
    production_density: float = 0.7
    approx_cap: int = 64
    len_cap: int = 64


def instance_rng(cfg: FuzzConfig, index: int) -> random.Random:
    return random.Random(f"{cfg.seed}:{index}")


def random_simple_grammar(rng: random.Random, cfg: FuzzConfig) -> Grammar:
    n = rng.randint(1, cfg.max_nonterminals)
    t = rng.randint(1, cfg.max_terminals)
    nts = list(string.ascii_uppercase[:n])
    terminals = list(string.ascii_lowercase[:t])
    dead = set()
    if cfg.inject_dead and n > 1:
        dead = set(rng.sample(nts, rng.randint(1, max(1, n // 2))))
    triples = []
    for x in nts:
        if x in dead:
            continue
        picked = False
        for a in terminals:
            if rng.random() < cfg.production_density:
                rhs = tuple(rng.choice(nts) for _ in range(rng.randint(0, cfg.max_rhs_len)))
                triples.append((x, a, rhs))
                picked = True
        if not picked:
            # keep non-injected symbols alive so dead-symbol handling stays
            # a deliberate choice of the generator
            rhs = tuple(rng.choice(nts) for _ in range(rng.randint(0, cfg.max_rhs_len)))
            triples.append((x, rng.choice(terminals), rhs))
    return Grammar(triples, nonterminals=nts, terminals=terminals)


def random_word(rng: random.Random, g: Grammar, cfg: FuzzConfig):
    length = rng.randint(0, cfg.max_word_len)
    return tuple(rng.choice(g.nonterminals) for _ in range(length)) if g.nonterminals else ()


def run_instance(cfg: FuzzConfig, index: int) -> dict:
    """One generate-decide-certify round; returns a record with discrepancies."""
    rng = instance_rng(cfg, index)
    g = random_simple_grammar(rng, cfg)
    gamma = random_word(rng, g, cfg)
    delta = random_word(rng, g, cfg)
    record = {
        "index": index,
        "grammar": format_grammar(g),
        "left": format_word(gamma),
        "right": format_word(delta),
        "discrepancies": [],
        "guard": [],
    }

    def flag(kind, detail=""):
        record["discrepancies"].append({"kind": kind, "detail": detail})

    g2, [(gamma2, delta2)] = eliminate_dead(g, [(gamma, delta)])
    table = compute_norms(g2)
    gamma2, delta2 = prune(table, gamma2), prune(table, delta2)

    try:
        decision = decide(g2, table, gamma2, delta2, validate=True)
    except Exception as exc:  # noqa: BLE001 - everything here is a finding
        flag("decide-crash", repr(exc))
        return record

    n = max(1, len(g2.nonterminals))
    d = max(1, g2.degree)
    v = max(1, valuation(table, g2), table.seminorm(gamma2), table.seminorm(delta2))
    record["verdict"] = "bisimilar" if decision.bisimilar else "not-bisimilar"
    record["iterations"] = decision.stats.iterations
    record["basis_changes"] = decision.stats.basis_changes
    if decision.stats.iterations > n**12 * d**2 * v**2:
        flag("iteration-budget", str(decision.stats.iterations))
    if decision.stats.basis_changes > n**4:
        flag("basis-change-budget", str(decision.stats.basis_changes))

    guards = []

    def observe(verdict):
        guards.append((verdict.visited, verdict.pair_bound))

    closure = trace_closure_check(g2, gamma2, delta2, len_cap=cfg.len_cap, table=table)
    approx = approximant_distinguish(g2, gamma2, delta2, n_max=cfg.approx_cap)

    if decision.bisimilar:
        ok, failures = check_self_bisimulation(decision.basis, g2, table, on_verdict=observe)
        if not ok:
            flag("yes-not-self-bisimulation", repr(failures[:3]))
        root_verdict = decide_coinductive(decision.basis, table, gamma2, delta2)
        observe(root_verdict)
        if not root_verdict.congruent:
            flag("yes-root-not-congruent")
        if approx is not None:
            flag("yes-but-approximant-distinguishes", f"depth {approx[0]}")
        if closure.outcome == "no":
            flag("yes-but-closure-refutes", repr(closure.witness))
    else:
        if approx is None:
            flag("no-without-approximant-witness", f"cap {cfg.approx_cap}")
        if closure.outcome == "yes":
            flag("no-but-closure-confirms")

    # oracle cross-agreement, independent of the decided verdict
    if closure.outcome == "yes" and approx is not None:
        flag("oracle-disagreement", "closure yes, approximant distinguishes")
    if closure.outcome == "no" and approx is None:
        flag("oracle-disagreement", "closure no, approximant silent")

    record["guard"] = [
        {"visited": seen, "bound": bound} for seen, bound in guards if seen > bound
    ]
    return record


def run_fuzz(cfg: FuzzConfig) -> dict:
    """Run all instances and aggregate a deterministic summary document."""
    records = [run_instance(cfg, i) for i in range(cfg.count)]
    failing = [r for r in records if r["discrepancies"]]
    guard_violations = [
        {"index": r["index"], "guard": r["guard"]} for r in records if r["guard"]
    ]
    summary = {
        "config": asdict(cfg),
        "instances": cfg.count,
        "yes": sum(1 for r in records if r.get("verdict") == "bisimilar"),
        "no": sum(1 for r in records if r.get("verdict") == "not-bisimilar"),
        "discrepancies": [
            {
                "index": r["index"],
                "grammar": r["grammar"],
                "left": r["left"],
                "right": r["right"],
                "findings": r["discrepancies"],
            }
            for r in failing
        ],
        "guard_violations": guard_violations,
    }
    return summary


def summary_text(summary: dict) -> str:
    return json.dumps(summary, sort_keys=True, indent=2)
