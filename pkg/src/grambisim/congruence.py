"""Bases over grammar words and the congruence deciders built on them.

A basis is a finite relation on nonempty words.  It induces a congruence via
three rule shapes: the empty axiom, BPA1 (consume the single-nonterminal side
of a stored pair) and BPA2 (split against a stored pair with a nonempty tail).
Reading the rules as a greatest fixed point gives the coinductive congruence,
as a least fixed point the inductive one; both are decided here by building
the essentially unique proof tree, preferring BPA1 whenever both rules apply.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .grammar import ContractViolation, Grammar, Word, format_word
from .norms import INF, NormTable, descend, prune


class BudgetExceeded(RuntimeError):
    """A runtime complexity guard was blown; indicates a broken precondition."""


class Basis:
    """Finite relation on nonempty words, indexed by unordered head pair."""

    def __init__(self, pairs=()):
        self.pairs: list[tuple[Word, Word]] = []
        self._index: dict[frozenset, list[tuple[Word, Word]]] = {}
        for left, right in pairs:
            self.add((left, right))

    @classmethod
    def reflexive(cls, g: Grammar) -> "Basis":
        return cls(((x,), (x,)) for x in g.nonterminals)

    def add(self, pair) -> bool:
        left, right = tuple(pair[0]), tuple(pair[1])
        if not left or not right:
            raise ValueError("basis pairs relate nonempty words")
        pair = (left, right)
        if pair in self.pairs:
            return False
        self.pairs.append(pair)
        self._index.setdefault(frozenset((left[0], right[0])), []).append(pair)
        return True

    def remove(self, pair):
        left, right = tuple(pair[0]), tuple(pair[1])
        self.pairs.remove((left, right))
        key = frozenset((left[0], right[0]))
        self._index[key].remove((left, right))
        if not self._index[key]:
            del self._index[key]

    def lookup(self, x: str, y: str) -> list[tuple[Word, Word]]:
        """Stored pairs whose head nonterminals are {x, y}."""
        return self._index.get(frozenset((x, y)), [])

    def words(self):
        for left, right in self.pairs:
            yield left
            yield right

    def copy(self) -> "Basis":
        return Basis(self.pairs)

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def __contains__(self, pair):
        return (tuple(pair[0]), tuple(pair[1])) in self.pairs

    def __repr__(self):
        body = ", ".join(f"({format_word(l)}, {format_word(r)})" for l, r in self.pairs)
        return f"Basis[{body}]"


class BasisPredicates(NamedTuple):
    reflexive: bool
    simple: bool
    functional: bool
    norm_compliant: bool

    def all(self) -> bool:
        return self.reflexive and self.simple and self.functional and self.norm_compliant


def check_basis_predicates(basis: Basis, g: Grammar, table: NormTable) -> BasisPredicates:
    """Evaluate the four basis predicates by direct enumeration."""
    have = set(basis.pairs)
    reflexive = all(((x,), (x,)) in have for x in g.nonterminals)
    simple = all(len(entries) <= 1 for entries in basis._index.values())
    functional = True
    norm_compliant = True
    for left, right in basis.pairs:
        if len(left) == 1:
            x, y, beta = left[0], right[0], right[1:]
            if table.norm[x] is INF:
                if table.word_norm(right) is not INF:
                    norm_compliant = False
            else:
                if table.norm[y] is INF or table.norm[y] > table.norm[x]:
                    functional = False
                elif beta != descend(table, left, table.norm[y]):
                    functional = False
        else:
            if table.word_norm(left) is not INF or table.word_norm(right) is not INF:
                norm_compliant = False
    return BasisPredicates(reflexive, simple, functional, norm_compliant)


@dataclass(frozen=True)
class Refutation:
    reason: str  # "stuck" or "loop"
    pair: tuple[Word, Word]
    path: tuple  # (edge, pair) steps from the root goal, root edge is None


@dataclass(frozen=True)
class CongruenceVerdict:
    congruent: bool
    proof: frozenset | None
    refutation: Refutation | None
    visited: int
    pair_bound: int  # (|B| * (m+1))**2 with m the relevant maximum seminorm

    def to_json(self):
        doc = {
            "congruent": self.congruent,
            "visited": self.visited,
            "pair_bound": self.pair_bound,
        }
        if self.proof is not None:
            doc["proof"] = sorted(
                [format_word(l), format_word(r)] for l, r in self.proof
            )
        if self.refutation is not None:
            doc["refutation"] = {
                "reason": self.refutation.reason,
                "pair": [format_word(w) for w in self.refutation.pair],
                "path": [
                    {"edge": edge, "pair": [format_word(l), format_word(r)]}
                    for edge, (l, r) in self.refutation.path
                ],
            }
        return doc


def _require_simple(basis: Basis):
    for key, entries in basis._index.items():
        if len(entries) > 1:
            names = ", ".join(sorted(key))
            raise ContractViolation(f"basis is not simple: several pairs for heads {{{names}}}")


def _rule_children(basis: Basis, pair):
    """Children of the unique applicable rule, or None when the goal is stuck.

    BPA1 is preferred over BPA2 whenever the stored pair has a
    single-nonterminal side, which loses no derivations.
    """
    sigma, tau = pair
    if not sigma and not tau:
        return []
    if not sigma or not tau:
        return None
    entries = basis.lookup(sigma[0], tau[0])
    if not entries:
        return None
    lam, rho = entries[0]
    if lam[0] == sigma[0] and rho[0] == tau[0]:
        if len(lam) == 1:
            return [("BPA1-L", (rho[1:] + sigma[1:], tau[1:]))]
        return [("BPA2-L", (lam[1:], sigma[1:])), ("BPA2-L", (rho[1:], tau[1:]))]
    if len(lam) == 1:
        return [("BPA1-R", (rho[1:] + tau[1:], sigma[1:]))]
    return [("BPA2-R", (lam[1:], tau[1:])), ("BPA2-R", (rho[1:], sigma[1:]))]


def _bounds(basis: Basis, table: NormTable, gamma: Word, delta: Word):
    m = max(
        (table.seminorm(w) for w in basis.words()),
        default=0,
    )
    m = max(m, table.seminorm(gamma), table.seminorm(delta))
    pair_bound = (len(basis) * (m + 1)) ** 2
    # theorem-faithful cap: sides live in the seminorm-reducing sequences of
    # the goal words and basis words, plus the empty word
    hard_bound = ((2 * len(basis) + 2) * (m + 1) + 1) ** 2
    return pair_bound, hard_bound


def decide_coinductive(basis: Basis, table: NormTable, gamma, delta) -> CongruenceVerdict:
    """Decide goal membership in the coinductive congruence of `basis`.

    Builds the unique proof tree depth-first, never re-expanding a pair that
    has already appeared; a goal with no applicable rule refutes.
    """
    _require_simple(basis)
    gamma, delta = tuple(gamma), tuple(delta)
    pair_bound, hard_bound = _bounds(basis, table, gamma, delta)
    root = (gamma, delta)
    parents: dict = {root: None}
    stack = [root]
    while stack:
        pair = stack.pop()
        children = _rule_children(basis, pair)
        if children is None:
            return CongruenceVerdict(
                False, None, Refutation("stuck", pair, _path_to(parents, pair)),
                len(parents), pair_bound,
            )
        for edge, child in reversed(children):
            if child not in parents:
                parents[child] = (pair, edge)
                if len(parents) > hard_bound:
                    raise BudgetExceeded(
                        f"visited {len(parents)} pairs, above the congruence bound {hard_bound}"
                    )
                stack.append(child)
    return CongruenceVerdict(True, frozenset(parents), None, len(parents), pair_bound)


def decide_inductive(basis: Basis, table: NormTable, gamma, delta) -> CongruenceVerdict:
    """As `decide_coinductive`, except that a goal repeating one of its own
    ancestors refutes: no finite derivation can close such a loop."""
    _require_simple(basis)
    gamma, delta = tuple(gamma), tuple(delta)
    pair_bound, hard_bound = _bounds(basis, table, gamma, delta)
    root = (gamma, delta)
    frames = [[root, None, None, 0]]  # pair, incoming edge, children, cursor
    on_path = {root}
    proved = set()
    seen = {root}
    while frames:
        frame = frames[-1]
        pair, _, children, cursor = frame
        if children is None:
            children = _rule_children(basis, pair)
            if children is None:
                path = tuple((f[1], f[0]) for f in frames)
                return CongruenceVerdict(
                    False, None, Refutation("stuck", pair, path), len(seen), pair_bound
                )
            frame[2] = children
        if cursor < len(children):
            frame[3] += 1
            edge, child = children[cursor]
            if child in on_path:
                path = tuple((f[1], f[0]) for f in frames) + ((edge, child),)
                return CongruenceVerdict(
                    False, None, Refutation("loop", child, path), len(seen), pair_bound
                )
            if child in proved:
                continue
            seen.add(child)
            if len(seen) > hard_bound:
                raise BudgetExceeded(
                    f"visited {len(seen)} pairs, above the congruence bound {hard_bound}"
                )
            frames.append([child, edge, None, 0])
            on_path.add(child)
        else:
            frames.pop()
            on_path.discard(pair)
            proved.add(pair)
    return CongruenceVerdict(True, frozenset(proved), None, len(seen), pair_bound)


def _path_to(parents, pair):
    steps = []
    cursor = pair
    while cursor is not None:
        link = parents[cursor]
        if link is None:
            steps.append((None, cursor))
            cursor = None
        else:
            parent, edge = link
            steps.append((edge, cursor))
            cursor = parent
    steps.reverse()
    return tuple(steps)


def check_self_bisimulation(basis: Basis, g: Grammar, table: NormTable, on_verdict=None):
    """Check that matched transitions of every basis pair land in congruent pairs.

    Successor words are pruned before the congruence call: pruning preserves
    bisimilarity, and the certificates produced by the decision procedure are
    closed under it, whereas raw successor tails behind an unnormed symbol
    need not be derivable at all.

    Returns (ok, failures) where each failure is (pair, label, successors);
    label None flags an enabled-set mismatch.
    """
    if not g.is_simple:
        raise ContractViolation("self-bisimulation check requires a simple grammar")
    failures = []
    for left, right in basis.pairs:
        la, ra = g.enabled(left), g.enabled(right)
        if set(la) != set(ra):
            failures.append(((left, right), None, None))
            continue
        for a in la:
            succ_l = g.step(left, a)
            succ_r = g.step(right, a)
            verdict = decide_coinductive(
                basis, table, prune(table, succ_l), prune(table, succ_r)
            )
            if on_verdict is not None:
                on_verdict(verdict)
            if not verdict.congruent:
                failures.append(((left, right), a, (succ_l, succ_r)))
    return not failures, failures


def parse_basis(text: str, g: Grammar) -> Basis:
    """Parse `<word> == <word>` lines into a basis over `g`."""
    from .grammar import GrammarError, parse_word

    basis = Basis()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "==" not in line:
            raise GrammarError("expected '<word> == <word>'", lineno, 1)
        left_text, right_text = line.split("==", 1)
        left = g.check_word(parse_word(left_text))
        right = g.check_word(parse_word(right_text))
        if not left or not right:
            raise GrammarError("basis words must be nonempty", lineno, 1)
        basis.add((left, right))
    return basis
