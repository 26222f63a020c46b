"""The basis-updating decision procedure for simple grammar bisimilarity.

The decider grows a derivation tree of word pairs.  It maintains a basis
that starts reflexive and is extended by guesses: BPA1 guesses relate a
nonterminal to a word, BPA2 guesses relate two unnormed words.  A failing
leaf triggers a walk up the tree that repairs the basis (partial failure) or,
at the root or on a transition mismatch, settles non-bisimilarity (total
failure).  The set S accumulates head pairs proven irreducible and only ever
grows, which bounds the number of basis updates.

Every answer ships with a certificate: the final basis and tree for a yes,
the failure chain for a no, both replayable against the congruence module
and the oracles.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .congruence import Basis, BudgetExceeded
from .grammar import ContractViolation, Grammar, Word, format_word
from .norms import INF, NormTable, canonical_word, descend, order_key, prune, valuation

RULE_EDGES = ("BPA1", "BPA2")

# node kinds: "unfinished" and "pfail" leaves are transient; "loop"/"refl"
# are finished leaves; "plain"/"bpa1"/"bpa2" are internal; "tfail" ends a run
COUNTED_KINDS = {"loop", "refl", "plain", "bpa1", "bpa2"}


class Node:
    __slots__ = ("left", "right", "swapped", "kind", "edge", "parent", "children", "introduced_key")

    def __init__(self, left, right, swapped, edge=None, parent=None):
        self.left = left
        self.right = right
        self.swapped = swapped
        self.kind = "unfinished"
        self.edge = edge
        self.parent = parent
        self.children: list[Node] = []
        self.introduced_key = None

    @property
    def pair(self):
        return (self.left, self.right)

    def display_pair(self):
        return (self.right, self.left) if self.swapped else (self.left, self.right)

    def to_dict(self):
        left, right = self.display_pair()
        doc = {
            "pair": [format_word(left), format_word(right)],
            "mark": self.kind,
            "children": [
                {"edge": child.edge, "node": child.to_dict()} for child in self.children
            ],
        }
        return doc

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()

    def __repr__(self):
        return f"Node({format_word(self.left)}, {format_word(self.right)}, {self.kind})"


@dataclass
class DecisionStats:
    iterations: int = 0
    basis_changes: int = 0
    peak_seminorm: int = 0
    nonterminals: int = 0
    degree: int = 0
    v: int = 0
    iteration_budget: int = 0
    basis_budget: int = 0


@dataclass
class Decision:
    bisimilar: bool
    basis: Basis
    s_set: frozenset
    root: Node
    phases: list
    failure: dict | None
    stats: DecisionStats
    events: list

    def tree_pairs(self):
        return {node.pair for node in self.root.walk()}

    def trace_json(self, command=""):
        return {
            "schema": 1,
            "command": command,
            "verdict": "bisimilar" if self.bisimilar else "not-bisimilar",
            "stats": {
                "iterations": self.stats.iterations,
                "basis_changes": self.stats.basis_changes,
                "peak_seminorm": self.stats.peak_seminorm,
            },
            "tree": self.root.to_dict(),
            "phases": self.phases,
            "basis": sorted(
                [format_word(l), format_word(r)] for l, r in self.basis.pairs
            ),
            "s_set": sorted(sorted(k) for k in self.s_set),
            "failure": self.failure,
            "events": self.events,
        }


class _Run:
    def __init__(self, g: Grammar, table: NormTable, validate=False):
        self.g = g
        self.table = table
        self.validate = validate
        self.key = {x: order_key(g, table, x) for x in g.nonterminals}
        self.basis = Basis.reflexive(g)
        self.owner: dict = {}
        self.s_set: set = set()
        self.visited: Counter = Counter()
        self.events: list = []
        self.phases: list = []
        self.stats = DecisionStats(nonterminals=len(g.nonterminals), degree=g.degree)
        self.root: Node | None = None

    # ---- node plumbing -------------------------------------------------

    def make_node(self, left, right, edge=None, parent=None) -> Node:
        left = prune(self.table, left)
        right = prune(self.table, right)
        swapped = False
        if left and right and self.key[left[0]] < self.key[right[0]]:
            left, right, swapped = right, left, True
        self.stats.peak_seminorm = max(
            self.stats.peak_seminorm, self.table.seminorm(left), self.table.seminorm(right)
        )
        return Node(left, right, swapped, edge=edge, parent=parent)

    def attach(self, parent: Node, children):
        for edge, (l, r) in children:
            node = self.make_node(l, r, edge=edge, parent=parent)
            parent.children.append(node)

    def first_unfinished(self) -> Node | None:
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.kind == "unfinished":
                return node
            stack.extend(reversed(node.children))
        return None

    def finish(self, leaf: Node, kind: str):
        leaf.kind = kind
        self.visited[leaf.pair] += 1

    # ---- basis and S bookkeeping ---------------------------------------

    def log(self, op, **payload):
        entry = {"iteration": self.stats.iterations, "op": op}
        entry.update(payload)
        self.events.append(entry)

    def basis_add(self, node: Node, pair):
        key = frozenset((pair[0][0], pair[1][0]))
        assert key not in self.owner and not self.basis.lookup(pair[0][0], pair[1][0])
        self.basis.add(pair)
        self.owner[key] = node
        node.introduced_key = key
        self.stats.basis_changes += 1
        self.log("basis-add", pair=[format_word(pair[0]), format_word(pair[1])])

    def basis_drop(self, node: Node):
        key = node.introduced_key
        if key is None or self.owner.get(key) is not node:
            return
        for pair in self.basis.lookup(*_two(key)):
            self.basis.remove(pair)
            self.log("basis-remove", pair=[format_word(pair[0]), format_word(pair[1])])
            break
        del self.owner[key]
        node.introduced_key = None

    def s_add(self, key):
        if key not in self.s_set:
            self.s_set.add(key)
            self.log("s-add", pair=sorted(key))

    # ---- trace snapshots -------------------------------------------------

    def snapshot(self):
        self.phases.append(self.root.to_dict())


def _two(key):
    items = sorted(key)
    if len(items) == 1:
        return items[0], items[0]
    return items[0], items[1]


def decide(g: Grammar, table: NormTable, gamma, delta, validate: bool = False) -> Decision:
    """Decide bisimilarity of two (pruned) words over a simple grammar.

    Preconditions: `g` simple and free of dead nonterminals (run
    `eliminate_dead` first).  Set `validate` to re-check the basis predicate
    invariant after every iteration; the complexity budgets are always on.
    """
    if not g.is_simple:
        raise ContractViolation("the decision procedure requires a simple grammar")
    dead = g.dead_nonterminals()
    if dead:
        raise ContractViolation(f"dead nonterminals {dead}: apply eliminate_dead first")
    run = _Run(g, table, validate)
    gamma = prune(table, g.check_word(gamma))
    delta = prune(table, g.check_word(delta))
    n = max(1, len(g.nonterminals))
    d = max(1, g.degree)
    v = max(1, valuation(table, g), table.seminorm(gamma), table.seminorm(delta))
    run.stats.v = v
    run.stats.iteration_budget = n**12 * d**2 * v**2
    run.stats.basis_budget = n**4
    run.root = run.make_node(gamma, delta)

    verdict: bool | None = None
    failure = None
    while verdict is None:
        leaf = run.first_unfinished()
        if leaf is None:
            verdict = True
            break
        run.stats.iterations += 1
        if run.stats.iterations > run.stats.iteration_budget:
            raise BudgetExceeded("iteration budget exhausted")
        if run.stats.basis_changes > run.stats.basis_budget:
            raise BudgetExceeded("basis change budget exhausted")
        failure = _expand(run, leaf)
        if failure is not None:
            verdict = False
        if validate:
            _check_invariants(run)

    return Decision(
        bisimilar=verdict,
        basis=run.basis,
        s_set=frozenset(run.s_set),
        root=run.root,
        phases=run.phases,
        failure=failure,
        stats=run.stats,
        events=run.events,
    )


def _expand(run: _Run, leaf: Node):
    """One expansion step; returns a failure report on total failure, else None."""
    g, table = run.g, run.table
    pair = leaf.pair

    # 1: loop against a node still present in the tree
    if run.visited[pair] > 0:
        run.finish(leaf, "loop")
        return None
    # 2: identical words
    if leaf.left == leaf.right:
        run.finish(leaf, "refl")
        return None
    # 3: empty versus nonempty
    if not leaf.left or not leaf.right:
        return _partial_failure(run, leaf)

    x, y = leaf.left[0], leaf.right[0]
    tail_l, tail_r = leaf.left[1:], leaf.right[1:]

    entries = run.basis.lookup(x, y)
    if entries:
        lam, rho = entries[0]
        # engine bases are head-aligned with the node normalization
        assert lam[0] == x and rho[0] == y
        if len(lam) == 1:
            # 4: BPA1 expansion
            beta = rho[1:]
            run.attach(leaf, [("BPA1", (beta + tail_l, tail_r))])
        else:
            # 5: BPA2 expansion
            run.attach(leaf, [("BPA2", (lam[1:], tail_l)), ("BPA2", (rho[1:], tail_r))])
        leaf.kind = "plain"
        run.visited[pair] += 1
        return None

    enabled_x, enabled_y = g.enabled(leaf.left), g.enabled(leaf.right)
    if set(enabled_x) != set(enabled_y):
        # 6: transition mismatch, the words are incomparable
        leaf.kind = "tfail"
        return _total_failure(run, leaf, chain=())

    matching = [(a, g.productions[(x, a)][0], g.productions[(y, a)][0]) for a in enabled_x]
    nx, ny = table.norm[x], table.norm[y]

    if nx is INF and ny is INF:
        # 7: two unnormed heads; tails are empty by the pruning convention
        run.basis_add(leaf, ((x,), (y,)))
        leaf.kind = "bpa1"
        run.attach(leaf, [(a, (gx, gy)) for a, gx, gy in matching])
        run.visited[pair] += 1
        return None

    if nx is INF:
        # 8: unnormed head against a normed one
        if table.word_norm(leaf.right) is INF:
            run.basis_add(leaf, (leaf.left, leaf.right))
            leaf.kind = "bpa1"
            run.attach(leaf, [(a, (gx, gy + tail_r)) for a, gx, gy in matching])
            run.visited[pair] += 1
            return None
        return _partial_failure(run, leaf)

    # 9: both heads normed, with norm(x) >= norm(y) by the node ordering
    key = frozenset((x, y))
    u = canonical_word(table, y)
    beta = descend(table, (x,), ny)
    if key not in run.s_set and g.run((x,), u) == beta:
        run.basis_add(leaf, ((x,), (y,) + beta))
        leaf.kind = "bpa1"
        children = [(a, (gx, gy + beta)) for a, gx, gy in matching]
        children.append(("BPA1", (beta + tail_l, tail_r)))
        run.attach(leaf, children)
        run.visited[pair] += 1
        return None
    if table.word_norm(leaf.left) is INF and table.word_norm(leaf.right) is INF:
        run.basis_add(leaf, (leaf.left, leaf.right))
        run.s_add(key)
        leaf.kind = "bpa2"
        run.attach(leaf, [(a, (gx + tail_l, gy + tail_r)) for a, gx, gy in matching])
        run.visited[pair] += 1
        return None
    run.s_add(key)
    return _partial_failure(run, leaf)


def _partial_failure(run: _Run, origin: Node):
    """Walk up from a failing leaf, repairing the basis; may go total."""
    origin.kind = "pfail"
    run.snapshot()
    chain = [origin]
    node = origin
    while True:
        parent = node.parent
        if parent is None:
            node.kind = "tfail"
            return _total_failure(run, node, chain=tuple(chain[:-1]))
        via_transition = node.edge not in RULE_EDGES
        if parent.kind == "bpa1" and via_transition:
            both_unnormed = (
                run.table.word_norm(parent.left) is INF
                and run.table.word_norm(parent.right) is INF
            )
            x, y = parent.left[0], parent.right[0]
            key = frozenset((x, y))
            if both_unnormed:
                # replace the guess for {x, y} by the parent pair itself
                for old in list(run.basis.lookup(x, y)):
                    run.basis.remove(old)
                    run.log(
                        "basis-replace",
                        removed=[format_word(old[0]), format_word(old[1])],
                        added=[format_word(parent.left), format_word(parent.right)],
                    )
                run.basis.add((parent.left, parent.right))
                run.owner[key] = parent
                parent.introduced_key = key
                run.s_add(key)
                parent.kind = "bpa2"
                _remove_subtree(run, parent)
                matching = [
                    (a, run.g.productions[(x, a)][0], run.g.productions[(y, a)][0])
                    for a in run.g.enabled(parent.left)
                ]
                run.attach(
                    parent,
                    [
                        (a, (gx + parent.left[1:], gy + parent.right[1:]))
                        for a, gx, gy in matching
                    ],
                )
                run.stats.basis_changes += 1
                return None
            # a normed side: retract the guess and keep climbing
            run.basis_drop(parent)
            run.s_add(key)
        chain.append(parent)
        node = parent


def _remove_subtree(run: _Run, parent: Node):
    removed = []
    for child in parent.children:
        removed.extend(child.walk())
    parent.children = []
    for node in removed:
        if node.kind in COUNTED_KINDS:
            run.visited[node.pair] -= 1
        run.basis_drop(node)
        node.parent = None


def _total_failure(run: _Run, node: Node, chain):
    run.snapshot()
    return {
        "pair": [format_word(w) for w in node.display_pair()],
        "chain": [[format_word(w) for w in n.display_pair()] for n in chain],
    }


def _check_invariants(run: _Run):
    from .congruence import check_basis_predicates

    preds = check_basis_predicates(run.basis, run.g, run.table)
    if not preds.all():
        raise AssertionError(f"basis predicate broken after iteration {run.stats.iterations}: {preds}")
    for node in run.root.walk():
        if node.kind in COUNTED_KINDS and run.visited[node.pair] <= 0:
            raise AssertionError("visited index out of sync")


def decide_words(g: Grammar, gamma, delta, validate: bool = False):
    """Full preprocessing pipeline: extend dead symbols, prune, decide.

    Returns (decision, prepared grammar, norm table, prepared pair).
    """
    from .grammar import eliminate_dead
    from .norms import compute_norms

    g.check_word(gamma)
    g.check_word(delta)
    g2, [(gamma2, delta2)] = eliminate_dead(g, [(tuple(gamma), tuple(delta))])
    table = compute_norms(g2)
    gamma2, delta2 = prune(table, gamma2), prune(table, delta2)
    decision = decide(g2, table, gamma2, delta2, validate=validate)
    return decision, g2, table, (gamma2, delta2)
