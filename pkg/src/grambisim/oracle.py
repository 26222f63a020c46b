"""Independent ground-truth oracles for bisimilarity.

`approximant_distinguish` refutes: it finds the least depth at which the
inductive bisimilarity approximants separate two words, if any within a cap.
`trace_closure_check` confirms: for simple grammars the synchronized pair
graph is deterministic, so reaching a finite closed pair set proves
bisimilarity outright.  Neither shares code with the decision procedure.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .congruence import BudgetExceeded
from .grammar import ContractViolation, Grammar, Word
from .norms import NormTable, compute_norms, prune

DEFAULT_DEPTH = 64
DEFAULT_LEN_CAP = 64
DEFAULT_PAIR_BUDGET = 1_000_000


@dataclass(frozen=True)
class OracleVerdict:
    outcome: str  # "yes" | "no" | "inconclusive"
    depth: int | None = None
    witness: tuple[str, ...] | None = None

    def to_json(self):
        doc = {"outcome": self.outcome}
        if self.depth is not None:
            doc["depth"] = self.depth
        if self.witness is not None:
            doc["witness"] = list(self.witness)
        return doc


def bisim_approx(g: Grammar, gamma, delta, n: int, memo=None) -> bool:
    """Depth-n bisimilarity approximant, straight from the recursive definition.

    Works for nondeterministic grammars; exponential in the worst case, so
    only meant for small depths and desk-size instances.
    """
    if memo is None:
        memo = {}

    def by_label(w):
        succ: dict[str, list[Word]] = {}
        for a, target in g.transitions(w):
            succ.setdefault(a, []).append(target)
        return succ

    def sim(x: Word, y: Word, k: int) -> bool:
        if k == 0 or x == y:
            return True
        key = (x, y, k)
        cached = memo.get(key)
        if cached is not None:
            return cached
        sx, sy = by_label(x), by_label(y)
        ok = set(sx) == set(sy) and all(
            all(any(sim(xs, ys, k - 1) for ys in sy[a]) for xs in sx[a])
            and all(any(sim(xs, ys, k - 1) for xs in sx[a]) for ys in sy[a])
            for a in sx
        )
        memo[key] = ok
        return ok

    return sim(tuple(gamma), tuple(delta), n)


def approximant_distinguish(
    g: Grammar, gamma, delta, n_max: int = DEFAULT_DEPTH, pair_budget: int = DEFAULT_PAIR_BUDGET
):
    """Least n <= n_max with the words separated at depth n, plus a witness.

    For simple grammars the approximants coincide with synchronized trace
    exploration, so the least depth is 1 + the length of the shortest label
    path to an enabled-set mismatch (breadth-first, ties by terminal order).
    Returns None when no difference shows up within the cap.
    """
    gamma, delta = tuple(gamma), tuple(delta)
    if g.is_simple:
        return _distinguish_deterministic(g, gamma, delta, n_max, pair_budget)
    memo: dict = {}
    for n in range(1, n_max + 1):
        if not bisim_approx(g, gamma, delta, n, memo):
            return n, None  # label-word witnesses are ill-defined for nondeterministic games
    return None


def _distinguish_deterministic(g: Grammar, gamma: Word, delta: Word, n_max: int, pair_budget: int):
    table = compute_norms(g)
    start = (prune(table, gamma), prune(table, delta))
    parents: dict = {start: None}
    queue = deque([(start, 0)])
    while queue:
        (left, right), depth = queue.popleft()
        if set(g.enabled(left)) != set(g.enabled(right)):
            return depth + 1, _bfs_path(parents, (left, right))
        if left == right or depth + 1 >= n_max:
            # a diagonal pair matches itself at every depth
            continue
        for a in g.enabled(left):
            succ = (prune(table, g.step(left, a)), prune(table, g.step(right, a)))
            if succ not in parents:
                parents[succ] = ((left, right), a)
                if len(parents) > pair_budget:
                    raise BudgetExceeded(
                        f"approximant search exceeded {pair_budget} synchronized pairs"
                    )
                queue.append((succ, depth + 1))
    return None


def _bfs_path(parents, pair):
    labels = []
    while parents[pair] is not None:
        pair, a = parents[pair]
        labels.append(a)
    labels.reverse()
    return tuple(labels)


def trace_closure_check(
    g: Grammar,
    gamma,
    delta,
    len_cap: int = DEFAULT_LEN_CAP,
    table: NormTable | None = None,
    pair_budget: int = DEFAULT_PAIR_BUDGET,
) -> OracleVerdict:
    """Explore the synchronized pair graph; a finite closure confirms bisimilarity.

    Requires a simple grammar without dead nonterminals.  Pairs are pruned
    before memoization and diagonal pairs close on the spot.  A pair with
    mismatched enabled sets refutes with the depth-first label path as
    witness; words growing past `len_cap`, or a pair set growing past
    `pair_budget`, make the answer inconclusive rather than wrong.
    """
    if not g.is_simple:
        raise ContractViolation("closure check requires a simple grammar")
    dead = g.dead_nonterminals()
    if dead:
        raise ContractViolation(f"dead nonterminals {dead}: apply eliminate_dead first")
    if table is None:
        table = compute_norms(g)
    start = (prune(table, tuple(gamma)), prune(table, tuple(delta)))
    parents: dict = {start: None}
    stack = [start]
    capped = False
    while stack:
        pair = stack.pop()
        left, right = pair
        if left == right:
            continue
        if set(g.enabled(left)) != set(g.enabled(right)):
            witness = _bfs_path(parents, pair)
            return OracleVerdict("no", depth=len(witness) + 1, witness=witness)
        children = []
        for a in g.enabled(left):
            succ = (prune(table, g.step(left, a)), prune(table, g.step(right, a)))
            if len(succ[0]) > len_cap or len(succ[1]) > len_cap:
                capped = True
                continue
            if succ not in parents:
                parents[succ] = (pair, a)
                if len(parents) > pair_budget:
                    return OracleVerdict("inconclusive")
                children.append(succ)
        stack.extend(reversed(children))
    if capped:
        return OracleVerdict("inconclusive")
    return OracleVerdict("yes")
